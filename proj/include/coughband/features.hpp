#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "coughband/aux_features.hpp"
#include "coughband/band_features.hpp"
#include "coughband/framing.hpp"
#include "coughband/welch.hpp"

namespace coughband {

inline constexpr std::size_t kShortTermDim = kBandFeatureDim + kAuxFeatureDim;  // 117

// Fixed export column order: the 12 band descriptors as <name>_b1..b5,
// then spec_entropy, then the aux block.
const std::vector<std::string>& short_term_feature_names();

struct ShortTermParams {
    int sample_rate = kPipelineRate;
    FrameSpec frame;
    std::size_t welch_subframe = 275;
    std::array<double, kNumBands + 1> band_edges_hz = kDefaultBandEdgesHz;
    AuxConfig aux;
};

// Computes the full 117-value vector for one frame. Holds the precomputed
// window tables and FFT plans; immutable after construction and shared across
// worker threads, each with its own Workspace.
class ShortTermExtractor {
public:
    struct Workspace {
        fft::Plan::Workspace fft;
        AuxExtractor::Workspace aux;
    };

    explicit ShortTermExtractor(const ShortTermParams& params = {});

    std::size_t dim() const { return kShortTermDim; }
    const WelchEstimator& welch() const { return welch_; }
    const AuxExtractor& aux() const { return aux_; }
    const ShortTermParams& params() const { return params_; }

    void compute_psd(std::span<const double> frame, BandSpectrum& out, Workspace& ws) const;

    // band + aux features given this frame's PSD and the previous frame's
    // (null at recording start)
    void compute(std::span<const double> frame, const BandSpectrum& psd,
                 const BandSpectrum* prev_psd, std::span<double> out, Workspace& ws) const;

private:
    ShortTermParams params_;
    WelchEstimator welch_;
    AuxExtractor aux_;
};

}  // namespace coughband
