#include "coughband/band_features.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace coughband {

namespace {

double band_sum(std::span<const double> psd) {
    return std::accumulate(psd.begin(), psd.end(), 0.0);
}

}  // namespace

double spectral_centroid(std::span<const double> psd, std::span<const double> freqs) {
    const double total = band_sum(psd);
    if (total <= kSilentBandPower) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < psd.size(); ++k) acc += freqs[k] * psd[k];
    return acc / total;
}

double spectral_bandwidth(std::span<const double> psd, std::span<const double> freqs,
                          double centroid) {
    const double total = band_sum(psd);
    if (total <= kSilentBandPower) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < psd.size(); ++k) {
        const double d = freqs[k] - centroid;
        acc += d * d * psd[k];
    }
    return acc / total;
}

double spectral_crest_factor(std::span<const double> psd) {
    const double total = band_sum(psd);
    if (total <= kSilentBandPower) return 0.0;
    double mx = 0.0;
    for (double v : psd) mx = std::max(mx, v);
    // C = 1/N under the bin-index reading, so C * total is the mean
    return mx * static_cast<double>(psd.size()) / total;
}

double spectral_flatness(std::span<const double> psd) {
    const double total = band_sum(psd);
    if (total <= kSilentBandPower) return 0.0;
    double log_acc = 0.0;
    for (double v : psd) log_acc += std::log(std::max(v, kFlatnessFloor));
    const double gm = std::exp(log_acc / static_cast<double>(psd.size()));
    const double am = total / static_cast<double>(psd.size());
    return gm / am;
}

double spectral_flux(std::span<const double> current, std::span<const double> previous) {
    if (current.size() != previous.size())
        throw std::invalid_argument("spectral_flux: bin count mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < current.size(); ++k) {
        const double d = current[k] - previous[k];
        acc += d * d;
    }
    return acc;
}

double spectral_rolloff(std::span<const double> psd, std::span<const double> freqs) {
    const double total = band_sum(psd);
    if (total <= kSilentBandPower) return 0.0;
    const double target = 0.85 * total;
    double cum = 0.0;
    for (std::size_t k = 0; k < psd.size(); ++k) {
        cum += psd[k];
        if (cum >= target) return freqs[k];
    }
    return freqs[psd.size() - 1];  // only reachable via rounding
}

double f50_f90_ratio(std::span<const double> psd, std::span<const double> freqs) {
    const double total = band_sum(psd);
    if (total <= kSilentBandPower) return 0.0;
    double cum = 0.0;
    double f50 = -1.0, f90 = -1.0;
    for (std::size_t k = 0; k < psd.size(); ++k) {
        cum += psd[k];
        if (f50 < 0.0 && cum >= 0.5 * total) f50 = freqs[k];
        if (f90 < 0.0 && cum >= 0.9 * total) {
            f90 = freqs[k];
            break;
        }
    }
    if (f90 <= 0.0) return 0.0;  // 90% mass at the DC bin
    return f50 / f90;
}

double spectral_peak_entropy(std::span<const double> psd) {
    const std::size_t n = psd.size();
    if (n < 3 || band_sum(psd) <= kSilentBandPower) return 0.0;

    double peak_total = 0.0;
    std::vector<double> peaks;
    std::size_t k = 1;
    while (k + 1 < n) {
        if (psd[k] > psd[k - 1]) {
            std::size_t j = k;
            while (j + 1 < n && psd[j + 1] == psd[k]) ++j;
            if (j + 1 < n && psd[j + 1] < psd[k]) {
                peaks.push_back(psd[k]);  // plateau counted once, at its first bin
                peak_total += psd[k];
            }
            k = j + 1;
        } else {
            ++k;
        }
    }
    if (peaks.empty() || peak_total <= 0.0) return 0.0;

    double h = 0.0;
    for (double p : peaks) {
        const double q = p / peak_total;
        if (q > 0.0) h -= q * std::log10(q);
    }
    return h;
}

double spectral_renyi_entropy(std::span<const double> psd, double q) {
    const double total = band_sum(psd);
    if (total <= kSilentBandPower) return 0.0;
    double acc = 0.0;
    for (double v : psd) {
        const double p = v / total;
        acc += std::pow(p, q);
    }
    if (acc <= 0.0) return 0.0;
    return std::log(acc) / (1.0 - q);
}

namespace {

// population moments over the PSD values as a sample
bool psd_moments(std::span<const double> psd, double& mu, double& sigma) {
    const std::size_t n = psd.size();
    if (n == 0) return false;
    mu = band_sum(psd) / static_cast<double>(n);
    double var = 0.0;
    for (double v : psd) {
        const double d = v - mu;
        var += d * d;
    }
    sigma = std::sqrt(var / static_cast<double>(n));
    return sigma > 1e-12;
}

}  // namespace

double spectral_kurtosis(std::span<const double> psd) {
    double mu, sigma;
    if (!psd_moments(psd, mu, sigma)) return 0.0;
    double acc = 0.0;
    for (double v : psd) {
        const double z = (v - mu) / sigma;
        acc += z * z * z * z;
    }
    return acc / static_cast<double>(psd.size());
}

double spectral_skewness(std::span<const double> psd) {
    double mu, sigma;
    if (!psd_moments(psd, mu, sigma)) return 0.0;
    double acc = 0.0;
    for (double v : psd) {
        const double z = (v - mu) / sigma;
        acc += z * z * z;
    }
    return acc / static_cast<double>(psd.size());
}

std::array<double, kNumBands> relative_power(const BandSpectrum& spectrum) {
    std::array<double, kNumBands> rp{};
    const double total = band_sum(spectrum.psd);
    if (total <= kSilentBandPower) return rp;  // silent frame sentinel
    for (std::size_t j = 0; j < kNumBands; ++j)
        rp[j] = band_sum(spectrum.band_psd(j)) / total;
    return rp;
}

double spectral_entropy(std::span<const double, kNumBands> rp) {
    double h = 0.0;
    for (double p : rp)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

const std::array<std::string, kBandDescriptors>& band_descriptor_names() {
    static const std::array<std::string, kBandDescriptors> names = {
        "centroid",      "bandwidth",     "crest",    "flatness", "flux",
        "rolloff",       "f50f90",        "peak_entropy", "renyi_entropy",
        "kurtosis",      "skewness",      "rel_power"};
    return names;
}

void BandFeatureVector::flatten(std::span<double> out) const {
    std::size_t i = 0;
    for (std::size_t d = 0; d < kBandDescriptors; ++d)
        for (std::size_t j = 0; j < kNumBands; ++j) out[i++] = values[d][j];
    out[i++] = spec_entropy;
}

BandFeatureVector compute_band_features(const BandSpectrum& current, const BandSpectrum* previous) {
    BandFeatureVector out;

    for (std::size_t j = 0; j < kNumBands; ++j) {
        const auto psd = current.band_psd(j);
        const auto freqs = current.band_freqs(j);

        if (band_sum(psd) <= kSilentBandPower) {
            out.degenerate = true;  // all descriptors stay 0 for this band
            continue;
        }

        const double centroid = spectral_centroid(psd, freqs);
        out.values[0][j] = centroid;
        out.values[1][j] = spectral_bandwidth(psd, freqs, centroid);
        out.values[2][j] = spectral_crest_factor(psd);
        out.values[3][j] = spectral_flatness(psd);
        if (previous) {
            out.values[4][j] = spectral_flux(psd, previous->band_psd(j));
        } else {
            const std::vector<double> zeros(psd.size(), 0.0);
            out.values[4][j] = spectral_flux(psd, zeros);
        }
        out.values[5][j] = spectral_rolloff(psd, freqs);
        out.values[6][j] = f50_f90_ratio(psd, freqs);
        out.values[7][j] = spectral_peak_entropy(psd);
        out.values[8][j] = spectral_renyi_entropy(psd);
        out.values[9][j] = spectral_kurtosis(psd);
        out.values[10][j] = spectral_skewness(psd);
    }

    const auto rp = relative_power(current);
    for (std::size_t j = 0; j < kNumBands; ++j) out.values[11][j] = rp[j];
    out.spec_entropy = spectral_entropy(std::span<const double, kNumBands>{rp});
    return out;
}

}  // namespace coughband
