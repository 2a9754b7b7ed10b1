#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "coughband/fft.hpp"

namespace coughband {

inline constexpr std::size_t kNumBands = 5;

// Default band edges in Hz: [0,0.5), [0.5,1), [1,1.5), [1.5,2), [2,5.5125] kHz.
inline constexpr std::array<double, kNumBands + 1> kDefaultBandEdgesHz =
    {0.0, 500.0, 1000.0, 1500.0, 2000.0, 5512.5};

// One-sided Welch PSD of a frame plus the five band slices. Slices are
// half-open [begin, end) bin ranges; a bin at exactly 500 Hz falls in band 2,
// and the final band is closed at its upper edge.
struct BandSpectrum {
    std::vector<double> psd;
    std::vector<double> freqs;
    std::array<std::pair<std::size_t, std::size_t>, kNumBands> band_slices;

    std::span<const double> band_psd(std::size_t j) const {
        return {psd.data() + band_slices[j].first, band_slices[j].second - band_slices[j].first};
    }
    std::span<const double> band_freqs(std::size_t j) const {
        return {freqs.data() + band_slices[j].first, band_slices[j].second - band_slices[j].first};
    }
    std::size_t bins() const { return psd.size(); }
};

// Welch estimator over non-overlapping Hamming-windowed sub-frames.
// Normalization follows the usual density convention (1 / (fs * sum(w^2)),
// one-sided doubling), so sum(psd) * bin_width approximates the windowed
// signal power.
class WelchEstimator {
public:
    WelchEstimator(int sample_rate, std::size_t frame_len, std::size_t subframe_len,
                   std::span<const double> band_edges_hz = kDefaultBandEdgesHz);

    std::size_t bins() const { return n_bins_; }
    const std::vector<double>& freqs() const { return freqs_; }
    const std::array<std::pair<std::size_t, std::size_t>, kNumBands>& band_slices() const {
        return band_slices_;
    }

    void compute(std::span<const double> frame, BandSpectrum& out, fft::Plan::Workspace& ws) const;

    BandSpectrum compute(std::span<const double> frame) const {
        fft::Plan::Workspace ws;
        BandSpectrum bs;
        compute(frame, bs, ws);
        return bs;
    }

private:
    int sample_rate_;
    std::size_t frame_len_;
    std::size_t sub_len_;
    std::size_t n_segments_;
    std::size_t n_bins_;
    std::vector<double> window_;
    double scale_;  // 1 / (fs * sum(w^2))
    std::vector<double> freqs_;
    std::array<std::pair<std::size_t, std::size_t>, kNumBands> band_slices_;
    fft::Plan plan_;
};

}  // namespace coughband
