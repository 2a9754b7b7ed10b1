#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coughband/common.hpp"

namespace coughband {

// Labeled short-term feature set for one noise scenario.
struct LabeledMatrix {
    Matrix X;                                // observations x features
    std::vector<int> labels;                 // 1 = cough, 0 = non-cough
    std::vector<std::string> feature_names;  // size = X.cols
    std::string scenario;
};

// Full feature ranking for one scenario, best first. `weights` aligns with
// `ranked_names` and is non-increasing; `all_weights` is indexed by original
// feature position for tie-breaking in the combination step.
struct RankedFeatureSet {
    std::string scenario;
    std::vector<std::string> ranked_names;
    std::vector<std::size_t> ranked_indices;
    std::vector<double> weights;
    std::vector<double> all_weights;
};

struct SelectedFeature {
    std::string name;
    std::size_t index = 0;
    int step = 0;    // combination step (1..7) that admitted it
    int votes = 0;   // trials selecting it (filled by stability_vote)
};

struct SelectionResult {
    std::vector<SelectedFeature> features;

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(features.size());
        for (const auto& f : features) out.push_back(f.name);
        return out;
    }
    bool contains(const std::string& name) const {
        for (const auto& f : features)
            if (f.name == name) return true;
        return false;
    }
};

// Per-class counts are round(fraction * class_size); class ratio preserved
// within one observation. Deterministic under a fixed rng state.
std::vector<std::size_t> stratified_sample(const std::vector<int>& labels, double fraction,
                                           Rng& rng);

// n_draws pairwise-disjoint stratified samples (each class's index pool is
// shuffled once, then sliced).
std::vector<std::vector<std::size_t>> stratified_disjoint_samples(const std::vector<int>& labels,
                                                                  double fraction,
                                                                  std::size_t n_draws, Rng& rng);

// Levina-Bickel maximum-likelihood intrinsic dimension, averaged over
// k in [k_min, k_max]. Zero nearest-neighbour distances (duplicate points)
// skip the affected log-ratios; all-duplicate data is an error.
double intrinsic_dimension_mle(const Matrix& X, int k_min = 6, int k_max = 12);

// ReliefF with k nearest hits/misses per instance, every instance sampled,
// Manhattan distance over per-feature min-max scaled values. Constant
// features weigh 0. Ties break by feature index.
RankedFeatureSet relieff_rank(const LabeledMatrix& set, int k_neighbors = 10);

// The 7-step combination over the per-scenario top sets: 123, 23, 13, 12,
// only-3, only-2, only-1, stopping at `target` features. Within a step,
// features order by part-3 weight, then part-2, then part-1, then index.
SelectionResult combine_rankings(const RankedFeatureSet& part1, const RankedFeatureSet& part2,
                                 const RankedFeatureSet& part3, std::size_t top_set = 30,
                                 std::size_t target = 29);

// Keeps features selected by at least min_votes of the 5 trials, ordered by
// votes then best average combination step, truncated at target.
SelectionResult stability_vote(const std::vector<SelectionResult>& trials, int min_votes = 3,
                               std::size_t target = 29);

struct SelectionParams {
    double fraction = 0.10;
    std::size_t n_trials = 5;
    int k_neighbors = 10;
    std::size_t top_set = 30;   // membership size for the combination steps
    std::size_t target = 29;    // final feature count
    int min_votes = 3;
    int mle_k_min = 6;
    int mle_k_max = 12;
};

struct SelectionOutcome {
    SelectionResult final;
    std::vector<SelectionResult> trials;
    std::vector<std::vector<double>> mle_estimates;  // [trial][scenario]
};

// The full procedure: per trial, disjoint 10% stratified samples from each
// scenario, MLE estimate, ReliefF ranking, combination; then the >=3-of-5
// stability vote across trials.
SelectionOutcome run_selection(const LabeledMatrix& part1, const LabeledMatrix& part2,
                               const LabeledMatrix& part3, const SelectionParams& params,
                               std::uint64_t seed);

}  // namespace coughband
