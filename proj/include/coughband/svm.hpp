#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coughband/common.hpp"

namespace coughband {

struct KernelConfig {
    int degree = 2;
    double gamma = 0.0;  // <= 0 means 1/dim, resolved at training time
    double coef0 = 1.0;
};

// (gamma * <x, z> + coef0)^degree
double poly_kernel(std::span<const double> x, std::span<const double> z, const KernelConfig& k);

// z-scoring fitted on training data only. Constant features are flagged and
// standardize to zero so they cannot influence the kernel.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> sd;           // effective SDs, always > 0
    std::vector<std::uint8_t> dropped;

    std::size_t dim() const { return mean.size(); }
    void fit(const Matrix& X);
    void apply(std::span<const double> in, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> in) const;
};

struct SvmParams {
    double C = 1.0;
    bool balanced_weights = true;  // inverse class frequency
    double weight_pos = 1.0;       // used when balanced_weights is false
    double weight_neg = 1.0;
    double tolerance = 1e-3;       // SMO stopping criterion on the KKT gap
    long max_iterations = 10'000'000;
    double cache_mb = 256.0;
    bool standardize = true;
};

struct SvmModel {
    KernelConfig kernel;
    Standardizer standardizer;
    Matrix support_vectors;            // in standardized space
    std::vector<double> coefficients;  // alpha_i * y_i per support vector
    double bias = 0.0;
    double C = 1.0;
    double effective_weight_pos = 1.0;
    double effective_weight_neg = 1.0;
    std::uint64_t created_at = 0;      // unix seconds, excluded from the checksum

    // training diagnostics
    double kkt_residual = 0.0;
    long iterations = 0;

    std::size_t dim() const { return standardizer.dim(); }

    // sum_i coef_i * K(sv_i, std(x)) + bias; the sign is the class, the value
    // the ROC score
    double decision(std::span<const double> x) const;
    std::vector<double> decision_batch(const Matrix& X, int jobs = 0) const;
    int predict(std::span<const double> x) const { return decision(x) > 0.0 ? 1 : 0; }
};

// Dual SMO solver with second-order working-set selection and an LRU row
// cache. Labels are {0,1} or {-1,+1}; both classes must be present and all
// entries finite.
SvmModel svm_train(const Matrix& X, const std::vector<int>& labels, const SvmParams& params = {},
                   const KernelConfig& kernel = {});

// 2-of-3 majority.
int ensemble_vote(std::span<const int> votes);

// --- persistence (exact roundtrip; FNV-1a checksum over the payload) ---
void write_svm_blob(std::vector<unsigned char>& out, const SvmModel& model);
SvmModel read_svm_blob(const unsigned char*& p, const unsigned char* end);
void save_svm(const std::string& path, const SvmModel& model);
SvmModel load_svm(const std::string& path);

}  // namespace coughband
