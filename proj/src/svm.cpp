#include "coughband/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <list>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace coughband {

double poly_kernel(std::span<const double> x, std::span<const double> z, const KernelConfig& k) {
    if (x.size() != z.size())
        throw InputError("poly_kernel: dimension mismatch (" + std::to_string(x.size()) + " vs "
                         + std::to_string(z.size()) + ")");
    double dot = 0.0;
    for (std::size_t f = 0; f < x.size(); ++f) dot += x[f] * z[f];
    const double base = k.gamma * dot + k.coef0;
    double acc = 1.0;
    for (int d = 0; d < k.degree; ++d) acc *= base;
    return acc;
}

void Standardizer::fit(const Matrix& X) {
    const std::size_t n = X.rows, d = X.cols;
    mean.assign(d, 0.0);
    sd.assign(d, 1.0);
    dropped.assign(d, 0);
    if (n == 0) return;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t f = 0; f < d; ++f) mean[f] += X.at(i, f);
    for (std::size_t f = 0; f < d; ++f) mean[f] /= static_cast<double>(n);
    std::vector<double> var(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t f = 0; f < d; ++f) {
            const double dev = X.at(i, f) - mean[f];
            var[f] += dev * dev;
        }
    for (std::size_t f = 0; f < d; ++f) {
        const double s = std::sqrt(var[f] / static_cast<double>(n));
        if (s > 1e-12) {
            sd[f] = s;
        } else {
            sd[f] = 1.0;
            dropped[f] = 1;
        }
    }
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
    if (in.size() != dim())
        throw InputError("standardizer: input dimension " + std::to_string(in.size())
                         + " does not match model dimension " + std::to_string(dim()));
    for (std::size_t f = 0; f < dim(); ++f)
        out[f] = dropped[f] ? 0.0 : (in[f] - mean[f]) / sd[f];
}

std::vector<double> Standardizer::apply(std::span<const double> in) const {
    std::vector<double> out(dim());
    apply(in, out);
    return out;
}

namespace {

// LRU cache of kernel matrix rows Q_i[t] = y_i y_t K(x_i, x_t)
class QCache {
public:
    QCache(const Matrix& X, const std::vector<double>& y, const KernelConfig& kernel,
           double cache_mb)
        : X_(X), y_(y), kernel_(kernel) {
        const double row_bytes = static_cast<double>(X.rows) * sizeof(double);
        max_rows_ = std::max<std::size_t>(2, static_cast<std::size_t>(cache_mb * 1024.0 * 1024.0 / row_bytes));
        diag_.resize(X.rows);
        for (std::size_t i = 0; i < X.rows; ++i)
            diag_[i] = poly_kernel(X.row_span(i), X.row_span(i), kernel_);
    }

    const std::vector<double>& row(std::size_t i) {
        auto it = map_.find(i);
        if (it != map_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second.second);
            return it->second.first;
        }
        if (map_.size() >= max_rows_) {
            const std::size_t victim = lru_.back();
            lru_.pop_back();
            map_.erase(victim);
        }
        std::vector<double> r(X_.rows);
        const auto xi = X_.row_span(i);
#ifdef _OPENMP
        #pragma omp parallel for schedule(static) if (X_.rows > 4096)
#endif
        for (long t = 0; t < static_cast<long>(X_.rows); ++t)
            r[t] = y_[i] * y_[t] * poly_kernel(xi, X_.row_span(t), kernel_);
        lru_.push_front(i);
        auto [pos, ok] = map_.emplace(i, std::make_pair(std::move(r), lru_.begin()));
        return pos->second.first;
    }

    double diag(std::size_t i) const { return diag_[i]; }

private:
    const Matrix& X_;
    const std::vector<double>& y_;
    KernelConfig kernel_;
    std::size_t max_rows_;
    std::vector<double> diag_;
    std::list<std::size_t> lru_;
    std::unordered_map<std::size_t, std::pair<std::vector<double>, std::list<std::size_t>::iterator>> map_;
};

constexpr double kTau = 1e-12;

}  // namespace

SvmModel svm_train(const Matrix& X, const std::vector<int>& labels, const SvmParams& params,
                   const KernelConfig& kernel_in) {
    const std::size_t n = X.rows;
    if (n == 0 || labels.size() != n)
        throw InputError("svm_train: empty data or label count mismatch");
    for (double v : X.data)
        if (!std::isfinite(v)) throw InputError("svm_train: non-finite feature value");

    std::vector<double> y(n);
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = labels[i] > 0 ? 1.0 : -1.0;
        (labels[i] > 0 ? n_pos : n_neg)++;
    }
    if (n_pos == 0 || n_neg == 0)
        throw InputError("svm_train: both classes must be present (pos " + std::to_string(n_pos)
                         + ", neg " + std::to_string(n_neg) + ")");

    SvmModel model;
    model.kernel = kernel_in;
    if (model.kernel.gamma <= 0.0) model.kernel.gamma = 1.0 / static_cast<double>(X.cols);
    model.C = params.C;
    model.created_at = static_cast<std::uint64_t>(std::time(nullptr));

    // standardize on training statistics only
    Matrix Z(n, X.cols);
    if (params.standardize) {
        model.standardizer.fit(X);
        for (std::size_t i = 0; i < n; ++i)
            model.standardizer.apply(X.row_span(i), Z.row_span(i));
    } else {
        model.standardizer.mean.assign(X.cols, 0.0);
        model.standardizer.sd.assign(X.cols, 1.0);
        model.standardizer.dropped.assign(X.cols, 0);
        Z = X;
    }

    double w_pos = params.weight_pos, w_neg = params.weight_neg;
    if (params.balanced_weights) {
        w_pos = static_cast<double>(n) / (2.0 * static_cast<double>(n_pos));
        w_neg = static_cast<double>(n) / (2.0 * static_cast<double>(n_neg));
    }
    model.effective_weight_pos = w_pos;
    model.effective_weight_neg = w_neg;
    auto cost = [&](std::size_t i) { return params.C * (y[i] > 0 ? w_pos : w_neg); };

    QCache cache(Z, y, model.kernel, params.cache_mb);

    // SMO with second-order working-set selection
    std::vector<double> alpha(n, 0.0), G(n, -1.0);
    auto is_upper = [&](std::size_t t) { return alpha[t] >= cost(t); };
    auto is_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

    double final_gap = std::numeric_limits<double>::infinity();
    long iter = 0;
    for (; iter < params.max_iterations; ++iter) {
        // select i maximizing -y G over I_up
        double gmax = -std::numeric_limits<double>::infinity();
        double gmax2 = -std::numeric_limits<double>::infinity();
        long i = -1;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0 ? !is_upper(t) : !is_lower(t)) {
                const double v = y[t] > 0 ? -G[t] : G[t];
                if (v >= gmax) {
                    gmax = v;
                    i = static_cast<long>(t);
                }
            }
        }

        long j = -1;
        double obj_min = std::numeric_limits<double>::infinity();
        const std::vector<double>* Qi = i >= 0 ? &cache.row(static_cast<std::size_t>(i)) : nullptr;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0 ? !is_lower(t) : !is_upper(t)) {
                const double yG = y[t] > 0 ? G[t] : -G[t];
                if (yG >= gmax2) gmax2 = yG;
                const double grad_diff = gmax + yG;
                if (grad_diff > 0 && Qi) {
                    const double sign = y[t] > 0 ? -2.0 : 2.0;
                    double quad = cache.diag(static_cast<std::size_t>(i)) + cache.diag(t)
                                  + sign * y[static_cast<std::size_t>(i)] * (*Qi)[t];
                    if (quad <= 0) quad = kTau;
                    const double obj = -(grad_diff * grad_diff) / quad;
                    if (obj <= obj_min) {
                        obj_min = obj;
                        j = static_cast<long>(t);
                    }
                }
            }
        }

        final_gap = gmax + gmax2;
        if (final_gap < params.tolerance || j == -1) break;

        const auto ii = static_cast<std::size_t>(i);
        const auto jj = static_cast<std::size_t>(j);
        const std::vector<double> Qi_copy = *Qi;  // row may be evicted fetching Qj
        const std::vector<double>& Qj = cache.row(jj);
        const double Ci = cost(ii), Cj = cost(jj);
        const double old_ai = alpha[ii], old_aj = alpha[jj];

        if (y[ii] != y[jj]) {
            double quad = cache.diag(ii) + cache.diag(jj) + 2.0 * Qi_copy[jj];
            if (quad <= 0) quad = kTau;
            const double delta = (-G[ii] - G[jj]) / quad;
            const double diff = alpha[ii] - alpha[jj];
            alpha[ii] += delta;
            alpha[jj] += delta;
            if (diff > 0) {
                if (alpha[jj] < 0) { alpha[jj] = 0; alpha[ii] = diff; }
            } else {
                if (alpha[ii] < 0) { alpha[ii] = 0; alpha[jj] = -diff; }
            }
            if (diff > Ci - Cj) {
                if (alpha[ii] > Ci) { alpha[ii] = Ci; alpha[jj] = Ci - diff; }
            } else {
                if (alpha[jj] > Cj) { alpha[jj] = Cj; alpha[ii] = Cj + diff; }
            }
        } else {
            double quad = cache.diag(ii) + cache.diag(jj) - 2.0 * Qi_copy[jj];
            if (quad <= 0) quad = kTau;
            const double delta = (G[ii] - G[jj]) / quad;
            const double sum = alpha[ii] + alpha[jj];
            alpha[ii] -= delta;
            alpha[jj] += delta;
            if (sum > Ci) {
                if (alpha[ii] > Ci) { alpha[ii] = Ci; alpha[jj] = sum - Ci; }
            } else {
                if (alpha[jj] < 0) { alpha[jj] = 0; alpha[ii] = sum; }
            }
            if (sum > Cj) {
                if (alpha[jj] > Cj) { alpha[jj] = Cj; alpha[ii] = sum - Cj; }
            } else {
                if (alpha[ii] < 0) { alpha[ii] = 0; alpha[jj] = sum; }
            }
        }

        const double dai = alpha[ii] - old_ai;
        const double daj = alpha[jj] - old_aj;
        for (std::size_t t = 0; t < n; ++t) G[t] += Qi_copy[t] * dai + Qj[t] * daj;
    }
    model.iterations = iter;
    model.kkt_residual = final_gap;

    // bias from the free support vectors
    {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t n_free = 0;
        for (std::size_t t = 0; t < n; ++t) {
            const double yG = y[t] * G[t];
            if (is_upper(t)) {
                if (y[t] < 0) ub = std::min(ub, yG);
                else lb = std::max(lb, yG);
            } else if (is_lower(t)) {
                if (y[t] > 0) ub = std::min(ub, yG);
                else lb = std::max(lb, yG);
            } else {
                ++n_free;
                sum_free += yG;
            }
        }
        const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
        model.bias = -rho;
    }

    // keep only the support vectors
    std::size_t n_sv = 0;
    for (double a : alpha)
        if (a > 0.0) ++n_sv;
    model.support_vectors = Matrix(n_sv, X.cols);
    model.coefficients.resize(n_sv);
    std::size_t s = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] <= 0.0) continue;
        std::copy_n(Z.row(t), X.cols, model.support_vectors.row(s));
        model.coefficients[s] = alpha[t] * y[t];
        ++s;
    }
    return model;
}

double SvmModel::decision(std::span<const double> x) const {
    const auto z = standardizer.apply(x);
    double acc = bias;
    for (std::size_t s = 0; s < support_vectors.rows; ++s)
        acc += coefficients[s] * poly_kernel(support_vectors.row_span(s), z, kernel);
    return acc;
}

std::vector<double> SvmModel::decision_batch(const Matrix& X, int jobs) const {
    std::vector<double> out(X.rows);
#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
    #pragma omp parallel for schedule(static)
#else
    (void)jobs;
#endif
    for (long i = 0; i < static_cast<long>(X.rows); ++i)
        out[i] = decision(X.row_span(i));
    return out;
}

int ensemble_vote(std::span<const int> votes) {
    if (votes.size() != 3) throw InputError("ensemble_vote: expected exactly 3 votes");
    int pos = 0;
    for (int v : votes) pos += (v == 1);
    return pos >= 2 ? 1 : 0;
}

// --- persistence ---

namespace {

constexpr char kSvmMagic[8] = {'C', 'B', 'S', 'V', 'M', '1', 0, 0};

template <typename T>
void put(std::vector<unsigned char>& out, const T& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(const unsigned char*& p, const unsigned char* end) {
    if (p + sizeof(T) > end) throw InputError("model blob truncated");
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
}

void put_doubles(std::vector<unsigned char>& out, const std::vector<double>& v) {
    put<std::uint64_t>(out, v.size());
    for (double x : v) put(out, x);
}

std::vector<double> get_doubles(const unsigned char*& p, const unsigned char* end) {
    const auto n = get<std::uint64_t>(p, end);
    std::vector<double> v(n);
    for (auto& x : v) x = get<double>(p, end);
    return v;
}

}  // namespace

void write_svm_blob(std::vector<unsigned char>& out, const SvmModel& m) {
    out.insert(out.end(), kSvmMagic, kSvmMagic + 8);
    put<std::uint32_t>(out, 1);
    put<std::uint64_t>(out, m.created_at);
    put<std::int32_t>(out, m.kernel.degree);
    put<double>(out, m.kernel.gamma);
    put<double>(out, m.kernel.coef0);
    put<double>(out, m.C);
    put<double>(out, m.effective_weight_pos);
    put<double>(out, m.effective_weight_neg);
    put<double>(out, m.bias);
    put<double>(out, m.kkt_residual);
    put<std::int64_t>(out, m.iterations);
    put_doubles(out, m.standardizer.mean);
    put_doubles(out, m.standardizer.sd);
    put<std::uint64_t>(out, m.standardizer.dropped.size());
    out.insert(out.end(), m.standardizer.dropped.begin(), m.standardizer.dropped.end());
    put<std::uint64_t>(out, m.support_vectors.rows);
    put<std::uint64_t>(out, m.support_vectors.cols);
    for (double v : m.support_vectors.data) put(out, v);
    put_doubles(out, m.coefficients);
}

SvmModel read_svm_blob(const unsigned char*& p, const unsigned char* end) {
    if (p + 8 > end || std::memcmp(p, kSvmMagic, 8) != 0)
        throw InputError("not an SVM model container (bad magic)");
    p += 8;
    const auto version = get<std::uint32_t>(p, end);
    if (version != 1)
        throw InputError("unsupported SVM model format version " + std::to_string(version));

    SvmModel m;
    m.created_at = get<std::uint64_t>(p, end);
    m.kernel.degree = get<std::int32_t>(p, end);
    m.kernel.gamma = get<double>(p, end);
    m.kernel.coef0 = get<double>(p, end);
    m.C = get<double>(p, end);
    m.effective_weight_pos = get<double>(p, end);
    m.effective_weight_neg = get<double>(p, end);
    m.bias = get<double>(p, end);
    m.kkt_residual = get<double>(p, end);
    m.iterations = get<std::int64_t>(p, end);
    m.standardizer.mean = get_doubles(p, end);
    m.standardizer.sd = get_doubles(p, end);
    const auto nd = get<std::uint64_t>(p, end);
    if (p + nd > end) throw InputError("model blob truncated");
    m.standardizer.dropped.assign(p, p + nd);
    p += nd;
    const auto rows = get<std::uint64_t>(p, end);
    const auto cols = get<std::uint64_t>(p, end);
    m.support_vectors = Matrix(rows, cols);
    for (auto& v : m.support_vectors.data) v = get<double>(p, end);
    m.coefficients = get_doubles(p, end);
    return m;
}

void save_svm(const std::string& path, const SvmModel& model) {
    std::vector<unsigned char> blob;
    write_svm_blob(blob, model);
    // checksum skips the timestamp field (offset 12, 8 bytes)
    std::uint64_t h = fnv1a64(blob.data(), 12);
    h = fnv1a64(blob.data() + 20, blob.size() - 20, h);
    put<std::uint64_t>(blob, h);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw InputError("cannot create model file: " + tmp);
        f.write(reinterpret_cast<const char*>(blob.data()),
                static_cast<std::streamsize>(blob.size()));
        if (!f) throw InputError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

SvmModel load_svm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open model file: " + path);
    std::vector<unsigned char> blob((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (blob.size() < 28) throw InputError(path + ": truncated model file");
    const std::size_t payload = blob.size() - sizeof(std::uint64_t);
    std::uint64_t stored;
    std::memcpy(&stored, blob.data() + payload, sizeof(stored));
    std::uint64_t h = fnv1a64(blob.data(), 12);
    h = fnv1a64(blob.data() + 20, payload - 20, h);
    if (stored != h) throw InputError(path + ": model checksum mismatch");
    const unsigned char* p = blob.data();
    return read_svm_blob(p, blob.data() + payload);
}

}  // namespace coughband
