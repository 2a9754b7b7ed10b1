#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coughband/config.hpp"
#include "coughband/evaluation.hpp"
#include "coughband/feature_table.hpp"
#include "coughband/representation.hpp"
#include "coughband/selection.hpp"
#include "coughband/svm.hpp"

namespace coughband {

// Long-term view over a set of extracted recordings: per-stream frame
// matrices (reduced to the selected features) and the 5-frame groups built
// over them. Groups never cross recording boundaries.
struct GroupedDataset {
    std::vector<Matrix> stream_frames;              // selected features per recording
    std::vector<std::vector<int>> stream_labels;    // per-frame labels
    std::vector<std::size_t> stream_patient;
    std::vector<std::size_t> stream_scenario;       // 0..2
    std::vector<std::string> stream_source;
    std::vector<std::string> patients;

    struct Group {
        std::size_t stream;
        std::size_t first_frame;
        int label;
        double start_s;
        double end_s;
    };
    std::vector<Group> groups;
    std::vector<std::string> selected_names;
    bool has_labels = false;

    std::size_t scenario_of(std::size_t g) const { return stream_scenario[groups[g].stream]; }
    std::size_t patient_of(std::size_t g) const { return stream_patient[groups[g].stream]; }
    Matrix group_frames(std::size_t g) const;  // 5 x d copy
};

// keep_indices: positions of the selected features inside the tables'
// columns; empty selects every column.
GroupedDataset build_grouped_dataset(const std::vector<FeatureTable>& tables,
                                     const std::vector<std::size_t>& keep_indices);

// Trained pipeline stage: the SVM with the representation it expects.
struct PipelineModel {
    std::string part_tag;  // part1|part2|part3 or "all"
    Representation representation = Representation::avgsd;
    std::vector<std::string> selected_names;
    std::optional<Codebook> codebook;  // boaw only
    SvmModel svm;

    std::vector<double> encode(const Matrix& group_frames) const;
    double score(const Matrix& group_frames) const { return svm.decision(encode(group_frames)); }
};

struct PipelineEnsemble {
    std::vector<PipelineModel> members;  // exactly 3, tagged part1..part3
};

// Trains on the given group subset (all of it; no cross-validation here).
PipelineModel train_pipeline_model(const GroupedDataset& data,
                                   const std::vector<std::size_t>& group_ids,
                                   const PipelineConfig& cfg, const std::string& part_tag);

// --- model containers ---
void save_pipeline_model(const std::string& path, const PipelineModel& model);
PipelineModel load_pipeline_model(const std::string& path);
void save_pipeline_ensemble(const std::string& path, const PipelineEnsemble& ensemble);
PipelineEnsemble load_pipeline_ensemble(const std::string& path);
bool is_ensemble_file(const std::string& path);

// --- cross-validated evaluation ---

struct FoldMetrics {
    std::size_t fold = 0;
    ConfusionCounts confusion;
    double auc = 0.0;
    bool auc_valid = false;
};

struct ExperimentReport {
    std::string scheme;
    std::string mode;
    std::string representation;
    ConfusionCounts pooled;
    double auc_pooled = 0.0;
    double auc_fold_average = 0.0;   // headline figure
    RocResult roc;                   // pooled scores
    std::vector<FoldMetrics> folds;
    std::map<std::string, ConfusionCounts> per_scenario;
    std::vector<std::string> warnings;

    // aligned with the dataset's groups; tested[g] marks groups that appeared
    // in some test fold
    std::vector<std::uint8_t> tested;
    std::vector<int> predictions;
    std::vector<int> labels;
    std::vector<double> scores;
};

ExperimentReport run_experiment(const GroupedDataset& data, const PipelineConfig& cfg);

std::string report_to_text(const ExperimentReport& report);
std::string report_to_json(const ExperimentReport& report);

}  // namespace coughband
