#include "coughband/resample.hpp"

#include <cmath>
#include <vector>

#include "coughband/common.hpp"

namespace coughband {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double bessel_i0(double x) {
    // series expansion, converges quickly for the beta values used here
    double sum = 1.0, term = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= (x / (2.0 * k)) * (x / (2.0 * k));
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return sum;
}

// Kaiser-windowed sinc low-pass, unit DC gain, odd length.
std::vector<double> design_lowpass(int factor) {
    const int taps = 32 * factor + 1;
    const int half = taps / 2;
    const double cutoff = 0.5 / factor;  // normalized to input rate
    const double beta = 8.0;
    std::vector<double> h(taps);
    double sum = 0.0;
    for (int i = 0; i < taps; ++i) {
        int m = i - half;
        double sinc = (m == 0) ? 2.0 * cutoff
                               : std::sin(2.0 * kPi * cutoff * m) / (kPi * m);
        double t = static_cast<double>(i) / (taps - 1);
        double w = bessel_i0(beta * std::sqrt(1.0 - (2.0 * t - 1.0) * (2.0 * t - 1.0))) / bessel_i0(beta);
        h[i] = sinc * w;
        sum += h[i];
    }
    for (double& v : h) v /= sum;
    return h;
}

}  // namespace

AudioSignal resample(const AudioSignal& signal, int target_rate) {
    if (signal.samples.empty())
        throw InputError("resample: empty signal");
    if (target_rate <= 0)
        throw InputError("resample: target rate must be positive");
    if (target_rate >= signal.sample_rate)
        throw InputError("resample: target rate " + std::to_string(target_rate)
                         + " must be below source rate " + std::to_string(signal.sample_rate));
    if (signal.sample_rate % target_rate != 0)
        throw InputError("resample: source rate " + std::to_string(signal.sample_rate)
                         + " is not an integer multiple of " + std::to_string(target_rate));

    const int factor = signal.sample_rate / target_rate;
    const std::vector<double> h = design_lowpass(factor);
    const int half = static_cast<int>(h.size()) / 2;  // group delay

    const auto& x = signal.samples;
    const long n = static_cast<long>(x.size());
    const std::size_t out_len = (x.size() + factor - 1) / factor;

    AudioSignal out;
    out.sample_rate = target_rate;
    out.source_id = signal.source_id;
    out.samples.resize(out_len);

    // y[m] = sum_k h[k] * x[m*factor + half - k], edges hold-extended
    for (std::size_t m = 0; m < out_len; ++m) {
        const long center = static_cast<long>(m) * factor + half;
        double acc = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            long idx = center - static_cast<long>(k);
            if (idx < 0) idx = 0;
            else if (idx >= n) idx = n - 1;
            acc += h[k] * x[static_cast<std::size_t>(idx)];
        }
        out.samples[m] = acc;
    }
    return out;
}

}  // namespace coughband
