#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coughband/common.hpp"

namespace coughband {

// Mean followed by population standard deviation, feature-wise, over the
// group's short-term vectors. Output dimension is 2 x d.
std::vector<double> avgsd(std::span<const std::span<const double>> group);
std::vector<double> avgsd(const Matrix& frames);  // all rows form one group

struct KMeansOptions {
    int max_iterations = 300;
    double tolerance = 1e-6;  // relative objective change
};

struct KMeansResult {
    Matrix centroids;                 // k x d
    std::vector<std::size_t> assignment;
    double objective = 0.0;           // total within-cluster squared distance
    int iterations = 0;
};

// Lloyd iterations from greedy farthest-point seeding (first centre drawn
// with the rng, the rest deterministic). Empty clusters are re-seeded from
// the point currently farthest from its centroid.
KMeansResult kmeans_fit(const Matrix& data, std::size_t k, Rng& rng, const KMeansOptions& = {});

// Supervised codebook: per-class K-Means, positive words first.
struct Codebook {
    Matrix words;                 // (k_pos + k_neg) x d
    std::size_t k_pos = 0;
    std::size_t k_neg = 0;
    std::uint64_t seed = 0;
    int iterations_pos = 0;
    int iterations_neg = 0;

    std::size_t size() const { return words.rows; }
    std::size_t dim() const { return words.cols; }
    bool word_is_positive(std::size_t w) const { return w < k_pos; }
};

Codebook build_codebook(const Matrix& pos_data, const Matrix& neg_data, std::size_t k_pos,
                        std::size_t k_neg, std::uint64_t seed, const KMeansOptions& = {});

// Nearest word index (Euclidean, ties to the lowest index).
std::size_t quantize(std::span<const double> x, const Codebook& codebook);

// Histogram of nearest-word counts over the group's frames; sums to the
// group size.
std::vector<std::uint32_t> boaw_encode(const Matrix& frames, const Codebook& codebook);

// Majority label over the group's five frame labels (odd size, no ties).
int label_group(std::span<const int> labels);

// Versioned binary container with exact roundtrip.
void save_codebook(const std::string& path, const Codebook& codebook);
Codebook load_codebook(const std::string& path);
void write_codebook_blob(std::vector<unsigned char>& out, const Codebook& codebook);
Codebook read_codebook_blob(const unsigned char*& p, const unsigned char* end);

}  // namespace coughband
