#include "coughband/aux_features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace coughband {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSilent = 1e-15;
}  // namespace

double hz_to_bark(double hz) {
    return 13.0 * std::atan(0.00076 * hz) + 3.5 * std::atan((hz / 7500.0) * (hz / 7500.0));
}

double bark_to_hz(double bark) {
    // bisection; hz_to_bark is strictly increasing
    double lo = 0.0, hi = 30000.0;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hz_to_bark(mid) < bark) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> dct2(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> out(n, 0.0);
    if (n == 0) return out;
    const double norm0 = std::sqrt(1.0 / static_cast<double>(n));
    const double norm = std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t < n; ++t)
            acc += x[t] * std::cos(kPi * (2.0 * t + 1.0) * k / (2.0 * n));
        out[k] = acc * (k == 0 ? norm0 : norm);
    }
    return out;
}

AuxExtractor::AuxExtractor(int sample_rate, std::size_t frame_len, const AuxConfig& cfg)
    : sample_rate_(sample_rate), frame_len_(frame_len), cfg_(cfg), plan_(frame_len) {
    window_.resize(frame_len_);
    for (std::size_t n = 0; n < frame_len_; ++n)
        window_[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * n / (frame_len_ - 1));

    n_bins_ = frame_len_ / 2 + 1;
    bin_freqs_.resize(n_bins_);
    for (std::size_t k = 0; k < n_bins_; ++k)
        bin_freqs_[k] = static_cast<double>(k) * sample_rate_ / static_cast<double>(frame_len_);

    // mel filterbank: triangular filters with edges equally spaced in mel
    {
        const double mel_lo = hz_to_mel(cfg_.mel_lo_hz);
        const double mel_hi = hz_to_mel(cfg_.mel_hi_hz);
        std::vector<double> edges(cfg_.mel_filters + 2);
        for (int i = 0; i < cfg_.mel_filters + 2; ++i)
            edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (cfg_.mel_filters + 1));
        mel_filters_.resize(cfg_.mel_filters);
        for (int f = 0; f < cfg_.mel_filters; ++f) {
            const double lo = edges[f], mid = edges[f + 1], hi = edges[f + 2];
            SparseFilter filt;
            bool started = false;
            for (std::size_t k = 0; k < n_bins_; ++k) {
                const double fr = bin_freqs_[k];
                if (fr <= lo || fr >= hi) {
                    if (started) break;
                    continue;
                }
                const double w = fr <= mid ? (fr - lo) / (mid - lo) : (hi - fr) / (hi - mid);
                if (!started) {
                    filt.first = k;
                    started = true;
                }
                filt.weights.push_back(w);
            }
            mel_filters_[f] = std::move(filt);
        }
    }

    // log-spaced bands over [62.5, 4000] for ASF and NASE
    {
        log_bands_.resize(cfg_.logbands);
        const double ratio = cfg_.logband_hi_hz / cfg_.logband_lo_hz;
        for (int b = 0; b < cfg_.logbands; ++b) {
            const double lo = cfg_.logband_lo_hz * std::pow(ratio, static_cast<double>(b) / cfg_.logbands);
            const double hi = cfg_.logband_lo_hz * std::pow(ratio, static_cast<double>(b + 1) / cfg_.logbands);
            std::size_t begin = 0;
            while (begin < n_bins_ && bin_freqs_[begin] < lo) ++begin;
            std::size_t end = begin;
            while (end < n_bins_ && bin_freqs_[end] < hi) ++end;
            if (b == cfg_.logbands - 1)  // close the top edge
                while (end < n_bins_ && bin_freqs_[end] <= hi + 1e-9) ++end;
            log_bands_[b] = {begin, end};
        }
    }

    // chroma: map each bin to a pitch class relative to the reference tuning
    {
        chroma_map_.assign(n_bins_, -1);
        for (std::size_t k = 0; k < n_bins_; ++k) {
            const double fr = bin_freqs_[k];
            if (fr < cfg_.chroma_lo_hz || fr > cfg_.chroma_hi_hz) continue;
            const long pc = std::lround(12.0 * std::log2(fr / cfg_.chroma_ref_hz));
            chroma_map_[k] = static_cast<int>(((pc % 12) + 12) % 12);
        }
    }

    // SSCH: triangular filters of fixed Bark width, centers equally spaced so
    // the filters span [0, hi]
    {
        const double z_max = hz_to_bark(cfg_.ssch_hi_hz);
        const double half_width = cfg_.ssch_bark_width / 2.0;
        bark_filters_.resize(cfg_.ssch_filters);
        bark_center_hz_.resize(cfg_.ssch_filters);
        for (int f = 0; f < cfg_.ssch_filters; ++f) {
            const double center = half_width
                + (z_max - cfg_.ssch_bark_width) * f / (cfg_.ssch_filters - 1);
            bark_center_hz_[f] = bark_to_hz(center);
            SparseFilter filt;
            bool started = false;
            for (std::size_t k = 0; k < n_bins_; ++k) {
                if (bin_freqs_[k] > cfg_.ssch_hi_hz) break;
                const double z = hz_to_bark(bin_freqs_[k]);
                const double w = 1.0 - std::abs(z - center) / half_width;
                if (w <= 0.0) {
                    if (started) break;
                    continue;
                }
                if (!started) {
                    filt.first = k;
                    started = true;
                }
                filt.weights.push_back(w);
            }
            bark_filters_[f] = std::move(filt);
        }
    }

    lag_min_ = static_cast<std::size_t>(std::lround(cfg_.hr_min_lag_ms * sample_rate_ / 1000.0));
    lag_max_ = static_cast<std::size_t>(std::lround(cfg_.hr_max_lag_ms * sample_rate_ / 1000.0));
    lag_max_ = std::min(lag_max_, frame_len_ - 1);
}

void AuxExtractor::power_spectrum(std::span<const double> frame, Workspace& ws) const {
    if (frame.size() != frame_len_)
        throw std::invalid_argument("aux features: frame length mismatch");
    ws.spectrum.resize(frame_len_);
    ws.scratch.resize(frame_len_);
    for (std::size_t n = 0; n < frame_len_; ++n) ws.scratch[n] = frame[n] * window_[n];
    plan_.forward_real(ws.scratch, ws.spectrum, ws.fft);
    ws.power.resize(n_bins_);
    for (std::size_t k = 0; k < n_bins_; ++k) ws.power[k] = std::norm(ws.spectrum[k]);
}

double AuxExtractor::frame_power(std::span<const double> frame) const {
    double acc = 0.0;
    for (double v : frame) acc += v * v;
    return acc;
}

namespace {

// normalized autocorrelation peak over a lag range
double hr_from_samples(std::span<const double> x, std::size_t lag_min, std::size_t lag_max) {
    const std::size_t n = x.size();
    double energy = 0.0;
    for (double v : x) energy += v * v;
    if (energy <= kSilent) return 0.0;

    double best = 0.0;
    for (std::size_t lag = lag_min; lag <= lag_max && lag < n; ++lag) {
        double num = 0.0, e0 = 0.0, e1 = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) {
            num += x[i] * x[i + lag];
            e0 += x[i] * x[i];
            e1 += x[i + lag] * x[i + lag];
        }
        const double denom = std::sqrt(e0 * e1);
        if (denom > kSilent) best = std::max(best, num / denom);
    }
    return std::clamp(best, 0.0, 1.0);
}

}  // namespace

void AuxExtractor::compute(std::span<const double> frame, std::span<double> out,
                           Workspace& ws) const {
    if (out.size() != kAuxFeatureDim)
        throw std::invalid_argument("aux features: output span must hold 56 values");

    power_spectrum(frame, ws);
    const auto& power = ws.power;
    std::size_t o = 0;

    // HR
    out[o++] = hr_from_samples(frame, lag_min_, lag_max_);

    // root MFCC: mel energies -> root compression -> DCT, coefficients 2..14
    {
        std::vector<double> energies(mel_filters_.size(), 0.0);
        for (std::size_t f = 0; f < mel_filters_.size(); ++f) {
            const auto& filt = mel_filters_[f];
            double acc = 0.0;
            for (std::size_t i = 0; i < filt.weights.size(); ++i)
                acc += filt.weights[i] * power[filt.first + i];
            energies[f] = std::pow(std::max(acc, 0.0), cfg_.root_power);
        }
        const auto coeffs = dct2(energies);
        for (int c = 1; c <= cfg_.dct_keep; ++c) out[o++] = coeffs[c];
    }

    // ASF: flatness per log band
    for (const auto& [begin, end] : log_bands_) {
        const std::span<const double> band{power.data() + begin, end - begin};
        double total = std::accumulate(band.begin(), band.end(), 0.0);
        if (band.empty() || total <= kSilent) {
            out[o++] = 0.0;
            continue;
        }
        double log_acc = 0.0;
        for (double v : band) log_acc += std::log(std::max(v, 1e-12));
        const double gm = std::exp(log_acc / static_cast<double>(band.size()));
        out[o++] = gm / (total / static_cast<double>(band.size()));
    }

    // NASE: band power envelope normalized to unit Euclidean norm + the norm
    {
        std::vector<double> env(log_bands_.size(), 0.0);
        for (std::size_t b = 0; b < log_bands_.size(); ++b) {
            const auto& [begin, end] = log_bands_[b];
            for (std::size_t k = begin; k < end; ++k) env[b] += power[k];
        }
        double norm = std::sqrt(std::inner_product(env.begin(), env.end(), env.begin(), 0.0));
        if (norm > kSilent) {
            for (double v : env) out[o++] = v / norm;
        } else {
            for (std::size_t b = 0; b < env.size(); ++b) out[o++] = 0.0;
            norm = 0.0;
        }
        out[o++] = norm;
    }

    // TI: dominant-line power fraction below the speech band limit
    {
        double total = 0.0, mx = 0.0;
        for (std::size_t k = 0; k < n_bins_; ++k) {
            if (bin_freqs_[k] > cfg_.ssch_hi_hz) break;
            total += power[k];
            mx = std::max(mx, power[k]);
        }
        out[o++] = total > kSilent ? mx / total : 0.0;
    }

    // ChroEn: Shannon entropy (natural log) of the pitch-class power distribution
    {
        std::array<double, 12> chroma{};
        double total = 0.0;
        for (std::size_t k = 0; k < n_bins_; ++k) {
            if (chroma_map_[k] < 0) continue;
            chroma[chroma_map_[k]] += power[k];
            total += power[k];
        }
        double h = 0.0;
        if (total > kSilent) {
            for (double c : chroma) {
                const double p = c / total;
                if (p > 0.0) h -= p * std::log(p);
            }
        }
        out[o++] = h;
    }

    // SSCH: per-filter centroids -> histogram -> DCT, coefficients 2..14
    {
        const double total = std::accumulate(power.begin(), power.end(), 0.0);
        if (total <= kSilent) {
            for (int c = 0; c < cfg_.dct_keep; ++c) out[o++] = 0.0;
        } else {
            const auto centroids = ssch_centroids(power);
            std::vector<double> hist(cfg_.ssch_bins, 0.0);
            for (double c : centroids) {
                auto bin = static_cast<long>(std::floor(c / cfg_.ssch_hi_hz * cfg_.ssch_bins));
                bin = std::clamp<long>(bin, 0, cfg_.ssch_bins - 1);
                hist[static_cast<std::size_t>(bin)] += 1.0;
            }
            const auto coeffs = dct2(hist);
            for (int c = 1; c <= cfg_.dct_keep; ++c) out[o++] = coeffs[c];
        }
    }
}

std::vector<double> AuxExtractor::ssch_centroids(std::span<const double> power) const {
    std::vector<double> centroids(bark_filters_.size());
    for (std::size_t f = 0; f < bark_filters_.size(); ++f) {
        const auto& filt = bark_filters_[f];
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < filt.weights.size(); ++i) {
            const double w = filt.weights[i] * power[filt.first + i];
            num += w * bin_freqs_[filt.first + i];
            den += w;
        }
        // a filter with no power contributes its center frequency
        centroids[f] = den > kSilent ? num / den : bark_center_hz_[f];
    }
    return centroids;
}

std::vector<double> AuxExtractor::mel_weight_per_bin() const {
    std::vector<double> sums(n_bins_, 0.0);
    for (const auto& filt : mel_filters_)
        for (std::size_t i = 0; i < filt.weights.size(); ++i)
            sums[filt.first + i] += filt.weights[i];
    return sums;
}

std::vector<std::string> AuxExtractor::feature_names() {
    std::vector<std::string> names;
    names.reserve(kAuxFeatureDim);
    names.emplace_back("hr");
    for (int i = 1; i <= 13; ++i) names.push_back("rmfcc_" + std::to_string(i));
    for (int i = 1; i <= 13; ++i) names.push_back("asf_" + std::to_string(i));
    for (int i = 1; i <= 14; ++i) names.push_back("nase_" + std::to_string(i));
    names.emplace_back("ti");
    names.emplace_back("chroen");
    for (int i = 1; i <= 13; ++i) names.push_back("ssch_" + std::to_string(i));
    return names;
}

// --- single-descriptor entry points (test support) ---

double AuxExtractor::harmonic_ratio(std::span<const double> frame) const {
    if (frame.size() != frame_len_)
        throw std::invalid_argument("harmonic_ratio: frame length mismatch");
    return hr_from_samples(frame, lag_min_, lag_max_);
}

namespace {
std::vector<double> slice(std::span<const double> all, std::size_t offset, std::size_t count) {
    return {all.begin() + offset, all.begin() + offset + count};
}
}  // namespace

std::vector<double> AuxExtractor::root_mfcc(std::span<const double> frame) const {
    Workspace ws;
    std::vector<double> out(kAuxFeatureDim);
    compute(frame, out, ws);
    return slice(out, 1, 13);
}

std::vector<double> AuxExtractor::audio_spectrum_flatness(std::span<const double> frame) const {
    Workspace ws;
    std::vector<double> out(kAuxFeatureDim);
    compute(frame, out, ws);
    return slice(out, 14, 13);
}

std::vector<double> AuxExtractor::nase(std::span<const double> frame) const {
    Workspace ws;
    std::vector<double> out(kAuxFeatureDim);
    compute(frame, out, ws);
    return slice(out, 27, 14);
}

double AuxExtractor::tonal_index(std::span<const double> frame) const {
    Workspace ws;
    std::vector<double> out(kAuxFeatureDim);
    compute(frame, out, ws);
    return out[41];
}

double AuxExtractor::chroma_entropy(std::span<const double> frame) const {
    Workspace ws;
    std::vector<double> out(kAuxFeatureDim);
    compute(frame, out, ws);
    return out[42];
}

std::vector<double> AuxExtractor::ssch(std::span<const double> frame) const {
    Workspace ws;
    std::vector<double> out(kAuxFeatureDim);
    compute(frame, out, ws);
    return slice(out, 43, 13);
}

}  // namespace coughband
