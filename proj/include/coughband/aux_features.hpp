#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "coughband/fft.hpp"

namespace coughband {

// Complementary short-term descriptors. Dimensions: HR 1, root-MFCC 13,
// ASF 13, NASE 14, TI 1, ChroEn 1, SSCH 13 -> 56 total.
inline constexpr std::size_t kAuxFeatureDim = 56;

struct AuxConfig {
    int mel_filters = 30;
    double mel_lo_hz = 0.0;
    double mel_hi_hz = 4000.0;
    double root_power = 0.5;     // compression exponent replacing the log
    int dct_keep = 13;           // DCT-II coefficients 2..14

    double logband_lo_hz = 62.5;
    double logband_hi_hz = 4000.0;
    int logbands = 13;

    double chroma_ref_hz = 440.0;
    double chroma_lo_hz = 55.0;
    double chroma_hi_hz = 4000.0;

    int ssch_filters = 30;
    double ssch_bark_width = 3.0;
    double ssch_hi_hz = 4000.0;
    int ssch_bins = 38;

    double hr_min_lag_ms = 2.5;
    double hr_max_lag_ms = 20.0;
};

// Hz <-> Bark (Zwicker) and Hz -> mel helpers shared with the tests.
double hz_to_bark(double hz);
double bark_to_hz(double bark);  // numeric inversion
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Orthonormal DCT-II.
std::vector<double> dct2(std::span<const double> x);

// Precomputed filterbanks and spectra layout for one frame size. Immutable
// after construction; compute() is safe to call concurrently with separate
// workspaces.
class AuxExtractor {
public:
    struct Workspace {
        fft::Plan::Workspace fft;
        std::vector<fft::cplx> spectrum;
        std::vector<double> power;
        std::vector<double> scratch;
    };

    AuxExtractor(int sample_rate, std::size_t frame_len, const AuxConfig& cfg = {});

    std::size_t dim() const { return kAuxFeatureDim; }
    static std::vector<std::string> feature_names();

    // out must hold kAuxFeatureDim values
    void compute(std::span<const double> frame, std::span<double> out, Workspace& ws) const;

    // individual descriptors (mainly for unit tests); each recomputes the
    // spectrum it needs from the raw frame
    double harmonic_ratio(std::span<const double> frame) const;
    std::vector<double> root_mfcc(std::span<const double> frame) const;
    std::vector<double> audio_spectrum_flatness(std::span<const double> frame) const;
    std::vector<double> nase(std::span<const double> frame) const;
    double tonal_index(std::span<const double> frame) const;
    double chroma_entropy(std::span<const double> frame) const;
    std::vector<double> ssch(std::span<const double> frame) const;

    // Hamming-windowed one-sided power spectrum of the full frame
    void power_spectrum(std::span<const double> frame, Workspace& ws) const;
    const std::vector<double>& bin_freqs() const { return bin_freqs_; }

    // SSCH internals exposed for the histogram-count test
    std::vector<double> ssch_centroids(std::span<const double> power) const;

    // summed mel filter weight per FFT bin (partition-of-unity check)
    std::vector<double> mel_weight_per_bin() const;

private:
    int sample_rate_;
    std::size_t frame_len_;
    AuxConfig cfg_;
    fft::Plan plan_;
    std::vector<double> window_;
    std::size_t n_bins_;
    std::vector<double> bin_freqs_;

    struct SparseFilter {
        std::size_t first = 0;
        std::vector<double> weights;
    };
    std::vector<SparseFilter> mel_filters_;
    std::vector<std::pair<std::size_t, std::size_t>> log_bands_;  // [begin, end) bins
    std::vector<int> chroma_map_;                                 // bin -> pitch class or -1
    std::vector<SparseFilter> bark_filters_;
    std::vector<double> bark_center_hz_;
    std::size_t lag_min_, lag_max_;

    double frame_power(std::span<const double> frame) const;
};

}  // namespace coughband
