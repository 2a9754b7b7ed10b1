#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "coughband/welch.hpp"

namespace coughband {

// Band-limited spectral descriptors. All functions take the PSD (and bin
// frequencies where needed) of a single band.
//
// Degenerate inputs (silent band, no local maxima, zero spread) return 0 by
// the sentinel policy rather than NaN; callers that need to tell silence from
// a true zero check the band power themselves.

inline constexpr double kSilentBandPower = 1e-15;
inline constexpr double kFlatnessFloor = 1e-12;

double spectral_centroid(std::span<const double> psd, std::span<const double> freqs);
double spectral_bandwidth(std::span<const double> psd, std::span<const double> freqs,
                          double centroid);
// max(psd) / mean(psd); flat spectrum -> 1, single-bin spectrum -> bin count
double spectral_crest_factor(std::span<const double> psd);
// geometric mean / arithmetic mean, bins floored at kFlatnessFloor before the log
double spectral_flatness(std::span<const double> psd);
// sum of squared bin differences against the previous frame's band PSD
double spectral_flux(std::span<const double> current, std::span<const double> previous);
// frequency of the first bin where the cumulative PSD reaches 85% of the total
double spectral_rolloff(std::span<const double> psd, std::span<const double> freqs);
// f[k50] / f[k90]; 0 when f[k90] is the DC bin
double f50_f90_ratio(std::span<const double> psd, std::span<const double> freqs);
// Shannon entropy (log10) of the peak-normalized local-maximum masses.
// Local maxima are strict interior peaks; plateau runs count once at their
// first bin; band endpoints are never peaks.
double spectral_peak_entropy(std::span<const double> psd);
// Renyi entropy of order q over normalized spectral probabilities, natural log
double spectral_renyi_entropy(std::span<const double> psd, double q = 4.0);
// standardized central moments of the PSD value distribution
double spectral_kurtosis(std::span<const double> psd);
double spectral_skewness(std::span<const double> psd);

// per-band power shares of the full spectrum; all-zero for a silent frame
std::array<double, kNumBands> relative_power(const BandSpectrum& spectrum);
// -sum rp*log2(rp), zero components skipped
double spectral_entropy(std::span<const double, kNumBands> rp);

// 12 descriptors per band, in export column order.
inline constexpr std::size_t kBandDescriptors = 12;
inline constexpr std::size_t kBandFeatureDim = kBandDescriptors * kNumBands + 1;  // 61

struct BandFeatureVector {
    // [descriptor][band], descriptor order matching band_descriptor_names()
    std::array<std::array<double, kNumBands>, kBandDescriptors> values{};
    double spec_entropy = 0.0;
    bool degenerate = false;  // some band (or the whole frame) was silent

    void flatten(std::span<double> out) const;  // kBandFeatureDim values
};

const std::array<std::string, kBandDescriptors>& band_descriptor_names();

// All 61 values for one frame. `previous` may be null for the first frame of
// a recording (flux then sees an all-zero history).
BandFeatureVector compute_band_features(const BandSpectrum& current, const BandSpectrum* previous);

}  // namespace coughband
