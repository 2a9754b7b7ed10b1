#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coughband/common.hpp"

namespace coughband {

// Per-recording short-term feature table: one row per frame, the 117 feature
// columns, frame timing and (when annotations were available) frame labels.
struct FeatureTable {
    std::string source_id;
    std::string patient_id;
    std::string scenario;
    std::vector<std::string> columns;
    Matrix features;                 // rows x columns
    std::vector<double> start_times;
    std::vector<int> labels;
    bool has_labels = false;

    std::size_t rows() const { return features.rows; }
};

// Compact binary table (magic CBFT1, version, checksum; exact roundtrip).
void save_feature_table(const std::string& path, const FeatureTable& table);
FeatureTable load_feature_table(const std::string& path);

// Delimited text with a mandatory header row: frame, start_time, label, then
// the feature columns in their documented order.
void save_feature_table_tsv(const std::string& path, const FeatureTable& table);

}  // namespace coughband
