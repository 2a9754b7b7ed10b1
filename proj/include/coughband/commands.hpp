#pragma once

#include <string>
#include <vector>

#include "coughband/config.hpp"
#include "coughband/experiment.hpp"
#include "coughband/manifest.hpp"
#include "coughband/selection.hpp"
#include "coughband/synth.hpp"

namespace coughband {

// Library-level command implementations; the CLI binary only parses flags and
// maps exceptions to exit codes.

struct CommandContext {
    PipelineConfig config;
    std::string output_dir = ".";
    int jobs = 0;
};

struct ExtractResult {
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
    std::string index_path;                // empty when the manifest was empty
    std::vector<std::string> diagnostics;  // one line per failed file
};

// Per-recording feature tables plus an index JSON; failures are collected per
// file rather than aborting the batch.
ExtractResult cmd_extract(const std::string& manifest_path, const CommandContext& ctx,
                          bool snr_table = false);

// Feature tables listed by an extract index.
std::vector<FeatureTable> load_tables_from_index(const std::string& index_path);

struct SelectResult {
    SelectionOutcome outcome;
    std::string selection_path;
    std::string report_path;
};

SelectResult cmd_select(const std::string& index_path, const CommandContext& ctx);

// Selected feature names/indices persisted by cmd_select.
std::vector<std::size_t> load_selection_indices(const std::string& selection_path);

struct TrainResult {
    std::vector<std::string> model_paths;
    std::vector<std::string> warnings;  // e.g. constant features dropped
};

// Trains on everything in the index (no cross-validation) according to
// config.mode; selection_path may be empty to train on all 117 features.
TrainResult cmd_train(const std::string& index_path, const std::string& selection_path,
                      const CommandContext& ctx);

struct PredictResult {
    std::string predictions_path;
    std::size_t n_groups = 0;
};

// model_path may be a single pipeline model or an ensemble container;
// features_path an extract index or a single feature table.
PredictResult cmd_predict(const std::string& model_path, const std::string& features_path,
                          const CommandContext& ctx);

struct EvaluateResult {
    ExperimentReport report;
    std::string report_text_path;
    std::string report_json_path;
    std::string roc_path;
    std::string predictions_path;
    std::string mcnemar_summary;  // non-empty when a comparison ran
};

EvaluateResult cmd_evaluate(const std::string& index_path, const std::string& selection_path,
                            const CommandContext& ctx,
                            const std::string& compare_predictions = "");

struct SynthResult {
    std::string manifest_path;
    std::string config_path;
};

SynthResult cmd_synth(const SynthConfig& synth_config, const CommandContext& ctx);

}  // namespace coughband
