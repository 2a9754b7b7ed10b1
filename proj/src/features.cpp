#include "coughband/features.hpp"

#include <stdexcept>

namespace coughband {

const std::vector<std::string>& short_term_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        v.reserve(kShortTermDim);
        for (const auto& d : band_descriptor_names())
            for (std::size_t j = 1; j <= kNumBands; ++j)
                v.push_back(d + "_b" + std::to_string(j));
        v.emplace_back("spec_entropy");
        for (auto& n : AuxExtractor::feature_names()) v.push_back(std::move(n));
        return v;
    }();
    return names;
}

ShortTermExtractor::ShortTermExtractor(const ShortTermParams& params)
    : params_(params),
      welch_(params.sample_rate, params.frame.frame_len, params.welch_subframe,
             params.band_edges_hz),
      aux_(params.sample_rate, params.frame.frame_len, params.aux) {}

void ShortTermExtractor::compute_psd(std::span<const double> frame, BandSpectrum& out,
                                     Workspace& ws) const {
    welch_.compute(frame, out, ws.fft);
}

void ShortTermExtractor::compute(std::span<const double> frame, const BandSpectrum& psd,
                                 const BandSpectrum* prev_psd, std::span<double> out,
                                 Workspace& ws) const {
    if (out.size() != kShortTermDim)
        throw std::invalid_argument("ShortTermExtractor: output span must hold 117 values");
    const BandFeatureVector bands = compute_band_features(psd, prev_psd);
    bands.flatten(out.subspan(0, kBandFeatureDim));
    aux_.compute(frame, out.subspan(kBandFeatureDim, kAuxFeatureDim), ws.aux);
}

}  // namespace coughband
