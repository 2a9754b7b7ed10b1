#pragma once

#include <cstdint>
#include <string>

#include "coughband/features.hpp"
#include "coughband/representation.hpp"
#include "coughband/selection.hpp"
#include "coughband/svm.hpp"

namespace coughband {

enum class Representation { avgsd, boaw };

std::string to_string(Representation r);
Representation representation_from_string(const std::string& s);

enum class PartitionScheme { block5, lopo };

std::string to_string(PartitionScheme s);
PartitionScheme scheme_from_string(const std::string& s);

enum class TrainMode { single, per_part, ensemble };

std::string to_string(TrainMode m);
TrainMode train_mode_from_string(const std::string& s);

// Everything the pipeline needs, with defaults matching the shipped feature
// set: 11025 Hz, 825-sample frames, 617-sample hop, 3x275 Welch sub-frames,
// the five fixed bands, 29 selected features, poly-2 SVM.
struct PipelineConfig {
    ShortTermParams short_term;
    SelectionParams selection;

    Representation representation = Representation::avgsd;
    std::size_t k_pos = 16;
    std::size_t k_neg = 16;
    KMeansOptions kmeans;

    SvmParams svm;
    KernelConfig kernel;

    PartitionScheme scheme = PartitionScheme::block5;
    TrainMode mode = TrainMode::ensemble;
    int guard_gap = 0;

    std::uint64_t seed = 42;
    bool write_text_features = true;
};

PipelineConfig load_config(const std::string& path);
void save_config(const std::string& path, const PipelineConfig& config);
std::string config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const std::string& json_text);

}  // namespace coughband
