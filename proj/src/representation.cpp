#include "coughband/representation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

namespace coughband {

std::vector<double> avgsd(std::span<const std::span<const double>> group) {
    if (group.empty()) throw InputError("avgsd: empty group");
    const std::size_t d = group.front().size();
    for (const auto& v : group)
        if (v.size() != d)
            throw InputError("avgsd: dimension mismatch inside group ("
                             + std::to_string(v.size()) + " vs " + std::to_string(d) + ")");

    std::vector<double> out(2 * d, 0.0);
    const double n = static_cast<double>(group.size());
    for (const auto& v : group)
        for (std::size_t f = 0; f < d; ++f) out[f] += v[f];
    for (std::size_t f = 0; f < d; ++f) out[f] /= n;
    for (const auto& v : group)
        for (std::size_t f = 0; f < d; ++f) {
            const double dev = v[f] - out[f];
            out[d + f] += dev * dev;
        }
    for (std::size_t f = 0; f < d; ++f) out[d + f] = std::sqrt(out[d + f] / n);
    return out;
}

std::vector<double> avgsd(const Matrix& frames) {
    std::vector<std::span<const double>> rows;
    rows.reserve(frames.rows);
    for (std::size_t i = 0; i < frames.rows; ++i) rows.push_back(frames.row_span(i));
    return avgsd(rows);
}

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t f = 0; f < d; ++f) {
        const double diff = a[f] - b[f];
        acc += diff * diff;
    }
    return acc;
}

std::size_t count_distinct(const Matrix& data) {
    std::set<std::vector<double>> rows;
    for (std::size_t i = 0; i < data.rows; ++i)
        rows.emplace(data.row(i), data.row(i) + data.cols);
    return rows.size();
}

}  // namespace

KMeansResult kmeans_fit(const Matrix& data, std::size_t k, Rng& rng, const KMeansOptions& opts) {
    const std::size_t n = data.rows, d = data.cols;
    if (k == 0) throw InputError("kmeans_fit: k must be positive");
    if (n < k || count_distinct(data) < k)
        throw InputError("kmeans_fit: need at least k = " + std::to_string(k)
                         + " distinct observations, have " + std::to_string(count_distinct(data)));

    KMeansResult res;
    res.centroids = Matrix(k, d);
    res.assignment.assign(n, 0);

    // greedy farthest-point seeding from one random start
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::size_t pick = static_cast<std::size_t>(rng.below(n));
    for (std::size_t c = 0; c < k; ++c) {
        std::copy_n(data.row(pick), d, res.centroids.row(c));
        double far_dist = -1.0;
        std::size_t far_idx = 0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], sq_dist(data.row(i), res.centroids.row(c), d));
            if (nearest[i] > far_dist) {
                far_dist = nearest[i];
                far_idx = i;
            }
        }
        pick = far_idx;
    }

    double prev_obj = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        res.iterations = iter;

        // assignment (ties to the lowest centroid index)
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double dist = sq_dist(data.row(i), res.centroids.row(c), d);
                if (dist < best) {
                    best = dist;
                    best_c = c;
                }
            }
            res.assignment[i] = best_c;
            objective += best;
        }
        res.objective = objective;

        // update
        Matrix sums(k, d);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = res.assignment[i];
            ++counts[c];
            const double* x = data.row(i);
            double* s = sums.row(c);
            for (std::size_t f = 0; f < d; ++f) s[f] += x[f];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // re-seed from the point farthest from its centroid
                double far_dist = -1.0;
                std::size_t far_idx = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double dist =
                        sq_dist(data.row(i), res.centroids.row(res.assignment[i]), d);
                    if (dist > far_dist) {
                        far_dist = dist;
                        far_idx = i;
                    }
                }
                std::copy_n(data.row(far_idx), d, res.centroids.row(c));
                continue;
            }
            double* ctr = res.centroids.row(c);
            const double inv = 1.0 / static_cast<double>(counts[c]);
            for (std::size_t f = 0; f < d; ++f) ctr[f] = sums.at(c, f) * inv;
        }

        if (prev_obj < std::numeric_limits<double>::infinity()) {
            const double change = std::abs(prev_obj - objective) / std::max(prev_obj, 1e-300);
            if (change <= opts.tolerance) break;
        }
        prev_obj = objective;
    }

    // final assignment against the updated centroids
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_c = 0;
        for (std::size_t c = 0; c < k; ++c) {
            const double dist = sq_dist(data.row(i), res.centroids.row(c), d);
            if (dist < best) {
                best = dist;
                best_c = c;
            }
        }
        res.assignment[i] = best_c;
        objective += best;
    }
    res.objective = objective;
    return res;
}

Codebook build_codebook(const Matrix& pos_data, const Matrix& neg_data, std::size_t k_pos,
                        std::size_t k_neg, std::uint64_t seed, const KMeansOptions& opts) {
    if (pos_data.cols != neg_data.cols)
        throw InputError("build_codebook: class data dimensions differ");

    // both classes cluster from the same seed, so swapping the class inputs
    // swaps the codebook halves exactly
    Rng rng_pos(seed);
    Rng rng_neg(seed);
    const auto pos = kmeans_fit(pos_data, k_pos, rng_pos, opts);
    const auto neg = kmeans_fit(neg_data, k_neg, rng_neg, opts);

    Codebook cb;
    cb.k_pos = k_pos;
    cb.k_neg = k_neg;
    cb.seed = seed;
    cb.iterations_pos = pos.iterations;
    cb.iterations_neg = neg.iterations;
    cb.words = Matrix(k_pos + k_neg, pos_data.cols);
    for (std::size_t c = 0; c < k_pos; ++c)
        std::copy_n(pos.centroids.row(c), cb.words.cols, cb.words.row(c));
    for (std::size_t c = 0; c < k_neg; ++c)
        std::copy_n(neg.centroids.row(c), cb.words.cols, cb.words.row(k_pos + c));
    return cb;
}

std::size_t quantize(std::span<const double> x, const Codebook& codebook) {
    if (x.size() != codebook.dim())
        throw InputError("quantize: vector dimension " + std::to_string(x.size())
                         + " does not match codebook dimension " + std::to_string(codebook.dim()));
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_w = 0;
    for (std::size_t w = 0; w < codebook.size(); ++w) {
        const double dist = sq_dist(x.data(), codebook.words.row(w), codebook.dim());
        if (dist < best) {
            best = dist;
            best_w = w;
        }
    }
    return best_w;
}

std::vector<std::uint32_t> boaw_encode(const Matrix& frames, const Codebook& codebook) {
    std::vector<std::uint32_t> hist(codebook.size(), 0);
    for (std::size_t i = 0; i < frames.rows; ++i)
        ++hist[quantize(frames.row_span(i), codebook)];
    return hist;
}

int label_group(std::span<const int> labels) {
    int pos = 0;
    for (int y : labels) pos += (y == 1);
    return 2 * pos > static_cast<int>(labels.size()) ? 1 : 0;
}

// --- persistence ---

namespace {

constexpr char kCodebookMagic[8] = {'C', 'B', 'C', 'B', 'K', '1', 0, 0};

template <typename T>
void put(std::vector<unsigned char>& out, const T& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(const unsigned char*& p, const unsigned char* end) {
    if (p + sizeof(T) > end) throw InputError("codebook blob truncated");
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
}

}  // namespace

void write_codebook_blob(std::vector<unsigned char>& out, const Codebook& cb) {
    out.insert(out.end(), kCodebookMagic, kCodebookMagic + 8);
    put<std::uint32_t>(out, 1);  // format version
    put<std::uint32_t>(out, static_cast<std::uint32_t>(cb.dim()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(cb.k_pos));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(cb.k_neg));
    put<std::uint64_t>(out, cb.seed);
    put<std::int32_t>(out, cb.iterations_pos);
    put<std::int32_t>(out, cb.iterations_neg);
    for (double v : cb.words.data) put(out, v);
}

Codebook read_codebook_blob(const unsigned char*& p, const unsigned char* end) {
    if (p + 8 > end || std::memcmp(p, kCodebookMagic, 8) != 0)
        throw InputError("not a codebook container (bad magic)");
    p += 8;
    const auto version = get<std::uint32_t>(p, end);
    if (version != 1)
        throw InputError("unsupported codebook format version " + std::to_string(version));

    Codebook cb;
    const auto dim = get<std::uint32_t>(p, end);
    cb.k_pos = get<std::uint32_t>(p, end);
    cb.k_neg = get<std::uint32_t>(p, end);
    cb.seed = get<std::uint64_t>(p, end);
    cb.iterations_pos = get<std::int32_t>(p, end);
    cb.iterations_neg = get<std::int32_t>(p, end);
    cb.words = Matrix(cb.k_pos + cb.k_neg, dim);
    for (auto& v : cb.words.data) v = get<double>(p, end);
    return cb;
}

void save_codebook(const std::string& path, const Codebook& cb) {
    std::vector<unsigned char> blob;
    write_codebook_blob(blob, cb);
    put<std::uint64_t>(blob, fnv1a64(blob.data(), blob.size()));
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw InputError("cannot create codebook file: " + tmp);
        f.write(reinterpret_cast<const char*>(blob.data()),
                static_cast<std::streamsize>(blob.size()));
        if (!f) throw InputError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Codebook load_codebook(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open codebook file: " + path);
    std::vector<unsigned char> blob((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (blob.size() < 8 + sizeof(std::uint64_t)) throw InputError(path + ": truncated codebook file");

    const std::size_t payload = blob.size() - sizeof(std::uint64_t);
    std::uint64_t stored;
    std::memcpy(&stored, blob.data() + payload, sizeof(stored));
    if (stored != fnv1a64(blob.data(), payload))
        throw InputError(path + ": codebook checksum mismatch");

    const unsigned char* p = blob.data();
    return read_codebook_blob(p, blob.data() + payload);
}

}  // namespace coughband
