#include "coughband/welch.hpp"

#include <cmath>
#include <stdexcept>

namespace coughband {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

WelchEstimator::WelchEstimator(int sample_rate, std::size_t frame_len, std::size_t subframe_len,
                               std::span<const double> band_edges_hz)
    : sample_rate_(sample_rate),
      frame_len_(frame_len),
      sub_len_(subframe_len),
      plan_(subframe_len) {
    if (subframe_len == 0 || frame_len % subframe_len != 0)
        throw std::invalid_argument("WelchEstimator: frame length must be a multiple of the sub-frame length");
    if (band_edges_hz.size() != kNumBands + 1)
        throw std::invalid_argument("WelchEstimator: expected 6 band edges");
    n_segments_ = frame_len / subframe_len;

    window_.resize(sub_len_);
    double wsq = 0.0;
    for (std::size_t n = 0; n < sub_len_; ++n) {
        window_[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * n / (sub_len_ - 1));
        wsq += window_[n] * window_[n];
    }
    scale_ = 1.0 / (sample_rate_ * wsq);

    n_bins_ = sub_len_ / 2 + 1;
    freqs_.resize(n_bins_);
    for (std::size_t k = 0; k < n_bins_; ++k)
        freqs_[k] = static_cast<double>(k) * sample_rate_ / static_cast<double>(sub_len_);

    // contiguous half-open slices; the last band keeps everything up to its
    // (inclusive) top edge
    std::size_t bin = 0;
    for (std::size_t j = 0; j < kNumBands; ++j) {
        const std::size_t begin = bin;
        if (j + 1 < kNumBands) {
            while (bin < n_bins_ && freqs_[bin] < band_edges_hz[j + 1]) ++bin;
        } else {
            while (bin < n_bins_ && freqs_[bin] <= band_edges_hz[j + 1] + 1e-9) ++bin;
        }
        band_slices_[j] = {begin, bin};
    }
    if (bin != n_bins_)
        throw std::invalid_argument("WelchEstimator: band edges do not cover the spectrum");
}

void WelchEstimator::compute(std::span<const double> frame, BandSpectrum& out,
                             fft::Plan::Workspace& ws) const {
    if (frame.size() != frame_len_)
        throw std::invalid_argument("welch_psd: frame length " + std::to_string(frame.size())
                                    + " != " + std::to_string(frame_len_));

    out.freqs = freqs_;
    out.band_slices = band_slices_;
    out.psd.assign(n_bins_, 0.0);

    ws.b.resize(sub_len_);
    ws.c.resize(sub_len_);
    for (std::size_t seg = 0; seg < n_segments_; ++seg) {
        const double* x = frame.data() + seg * sub_len_;
        for (std::size_t n = 0; n < sub_len_; ++n)
            ws.b[n] = fft::cplx{x[n] * window_[n], 0.0};
        plan_.forward(ws.b, ws.c, ws);
        for (std::size_t k = 0; k < n_bins_; ++k)
            out.psd[k] += std::norm(ws.c[k]) * scale_;
    }

    const double seg_inv = 1.0 / static_cast<double>(n_segments_);
    const bool even = (sub_len_ % 2 == 0);
    for (std::size_t k = 0; k < n_bins_; ++k) {
        double v = out.psd[k] * seg_inv;
        // one-sided doubling, except DC (and Nyquist when the length is even)
        if (k != 0 && !(even && k == n_bins_ - 1)) v *= 2.0;
        out.psd[k] = v;
    }
}

}  // namespace coughband
