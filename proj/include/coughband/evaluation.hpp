#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "coughband/audio.hpp"

namespace coughband {

// One observation inside a temporally ordered stream, carrying the short-term
// frame span it covers (inclusive) so train/test overlap can be enforced.
struct StreamObservation {
    std::size_t index;      // global observation index
    long span_first;        // first short-term frame of the group
    long span_last;         // last short-term frame (inclusive)
};

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

struct PartitionPlan {
    std::string scheme;
    std::vector<Fold> folds;
    std::vector<std::string> warnings;
};

// Five contiguous blocks per stream (remainder spread over the leading
// blocks); fold i tests block i across all streams. Train observations whose
// frame span overlaps a test observation's span in the same stream are
// dropped, plus guard_gap extra groups on each side of every cut.
PartitionPlan block5_partition(const std::vector<std::vector<StreamObservation>>& streams,
                               int guard_gap = 0);

// One fold per patient; the patient's observations form the test set.
PartitionPlan lopo_partition(const std::vector<std::size_t>& patient_of_obs);

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double sensitivity() const;  // percent
    double specificity() const;
    double accuracy() const;
};

ConfusionCounts confusion_metrics(std::span<const int> predictions, std::span<const int> labels);

struct RocResult {
    double auc = 0.0;
    std::vector<std::pair<double, double>> points;  // (FPR, TPR), monotone
};

// Trapezoidal AUC over all score thresholds; tied scores collapse into one
// threshold step, matching the rank-statistic value.
RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

struct McNemarResult {
    std::size_t b = 0;       // A right, B wrong
    std::size_t c = 0;       // A wrong, B right
    double statistic = 0.0;  // continuity-corrected chi-square
    double p_value = 1.0;
    std::string stars() const { return p_value < 0.01 ? "**" : (p_value < 0.05 ? "*" : ""); }
};

McNemarResult mcnemar_test(std::span<const int> pred_a, std::span<const int> pred_b,
                           std::span<const int> labels);

// --- SNR annotation ---

struct AnnotationSpan {
    double start_s = 0.0;
    double end_s = 0.0;
    std::string label;  // "cough" or "other"
};

struct EventSnr {
    std::size_t event_index = 0;
    double start_s = 0.0;
    double end_s = 0.0;
    double snr_db = 0.0;
    bool negative_excess = false;  // cough power <= noise power (snr_db is -inf sentinel)
    bool one_sided = false;        // only one neighbouring noise region available
};

// SNR of each cough event against the average power of the neighbouring
// non-cough regions (window of the event's own length on each side).
std::vector<EventSnr> snr_annotate(const AudioSignal& recording,
                                   const std::vector<AnnotationSpan>& spans);

}  // namespace coughband
