#include "coughband/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace coughband {

std::vector<std::size_t> stratified_sample(const std::vector<int>& labels, double fraction,
                                           Rng& rng) {
    auto draws = stratified_disjoint_samples(labels, fraction, 1, rng);
    return draws.front();
}

std::vector<std::vector<std::size_t>> stratified_disjoint_samples(const std::vector<int>& labels,
                                                                  double fraction,
                                                                  std::size_t n_draws, Rng& rng) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i)
        (labels[i] == 1 ? pos : neg).push_back(i);

    const auto pos_take = static_cast<std::size_t>(std::lround(fraction * pos.size()));
    const auto neg_take = static_cast<std::size_t>(std::lround(fraction * neg.size()));
    if (pos_take == 0 || pos_take * n_draws > pos.size())
        throw InputError("stratified_sample: positive class too small ("
                         + std::to_string(pos.size()) + " observations for " + std::to_string(n_draws)
                         + " draws of " + std::to_string(pos_take) + ")");
    if (neg_take == 0 || neg_take * n_draws > neg.size())
        throw InputError("stratified_sample: negative class too small ("
                         + std::to_string(neg.size()) + " observations for " + std::to_string(n_draws)
                         + " draws of " + std::to_string(neg_take) + ")");

    rng.shuffle(pos);
    rng.shuffle(neg);

    std::vector<std::vector<std::size_t>> draws(n_draws);
    for (std::size_t d = 0; d < n_draws; ++d) {
        auto& out = draws[d];
        out.insert(out.end(), pos.begin() + d * pos_take, pos.begin() + (d + 1) * pos_take);
        out.insert(out.end(), neg.begin() + d * neg_take, neg.begin() + (d + 1) * neg_take);
        std::sort(out.begin(), out.end());
    }
    return draws;
}

double intrinsic_dimension_mle(const Matrix& X, int k_min, int k_max) {
    const std::size_t n = X.rows;
    if (k_min < 2) throw InputError("intrinsic_dimension_mle: k_min must be >= 2");
    if (n < static_cast<std::size_t>(k_max) + 1)
        throw InputError("intrinsic_dimension_mle: need at least k_max + 1 observations");

    // sorted neighbour distances per point, up to k_max
    std::vector<std::vector<double>> knn(n);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) {
                dist[j] = std::numeric_limits<double>::infinity();
                continue;
            }
            double acc = 0.0;
            const double* a = X.row(i);
            const double* b = X.row(j);
            for (std::size_t f = 0; f < X.cols; ++f) {
                const double d = a[f] - b[f];
                acc += d * d;
            }
            dist[j] = std::sqrt(acc);
        }
        std::vector<double> d(dist);
        std::nth_element(d.begin(), d.begin() + k_max, d.end());
        knn[i].assign(d.begin(), d.begin() + k_max);
        std::sort(knn[i].begin(), knn[i].end());
    }

    double k_acc = 0.0;
    int k_valid = 0;
    for (int k = k_min; k <= k_max; ++k) {
        double point_acc = 0.0;
        std::size_t point_count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double tk = knn[i][k - 1];
            if (tk <= 0.0) continue;  // duplicates collapse the whole ratio set
            double log_acc = 0.0;
            int valid = 0;
            for (int j = 1; j < k; ++j) {
                const double tj = knn[i][j - 1];
                if (tj <= 0.0) continue;  // skipped log-ratio
                log_acc += std::log(tk / tj);
                ++valid;
            }
            if (valid == 0 || log_acc <= 0.0) continue;
            point_acc += static_cast<double>(valid) / log_acc;
            ++point_count;
        }
        if (point_count > 0) {
            k_acc += point_acc / static_cast<double>(point_count);
            ++k_valid;
        }
    }
    if (k_valid == 0)
        throw InputError("intrinsic_dimension_mle: degenerate data (all points coincide)");
    return k_acc / k_valid;
}

RankedFeatureSet relieff_rank(const LabeledMatrix& set, int k_neighbors) {
    const std::size_t n = set.X.rows;
    const std::size_t d = set.X.cols;
    if (set.labels.size() != n) throw InputError("relieff_rank: label/row count mismatch");

    std::size_t n_pos = 0, n_neg = 0;
    for (int y : set.labels) (y == 1 ? n_pos : n_neg)++;
    if (n_pos <= static_cast<std::size_t>(k_neighbors) || n_neg <= static_cast<std::size_t>(k_neighbors))
        throw InputError("relieff_rank: each class needs more than k_neighbors = "
                         + std::to_string(k_neighbors) + " observations (pos "
                         + std::to_string(n_pos) + ", neg " + std::to_string(n_neg) + ")");

    // per-feature min-max scaling to [0,1]; constant features become all zero
    Matrix S(n, d);
    for (std::size_t f = 0; f < d; ++f) {
        double lo = set.X.at(0, f), hi = lo;
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, set.X.at(i, f));
            hi = std::max(hi, set.X.at(i, f));
        }
        const double range = hi - lo;
        for (std::size_t i = 0; i < n; ++i)
            S.at(i, f) = range > 0.0 ? (set.X.at(i, f) - lo) / range : 0.0;
    }

    std::vector<double> w(d, 0.0);
    std::vector<std::pair<double, std::size_t>> hits, misses;
    const auto k = static_cast<std::size_t>(k_neighbors);

    for (std::size_t i = 0; i < n; ++i) {
        hits.clear();
        misses.clear();
        const double* xi = S.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double dist = 0.0;
            const double* xj = S.row(j);
            for (std::size_t f = 0; f < d; ++f) dist += std::abs(xi[f] - xj[f]);
            (set.labels[j] == set.labels[i] ? hits : misses).emplace_back(dist, j);
        }
        auto take_k = [k](std::vector<std::pair<double, std::size_t>>& v) {
            std::partial_sort(v.begin(), v.begin() + k, v.end());
            v.resize(k);
        };
        take_k(hits);
        take_k(misses);

        const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(k));
        for (std::size_t f = 0; f < d; ++f) {
            double hit_diff = 0.0, miss_diff = 0.0;
            for (const auto& [dist, j] : hits) hit_diff += std::abs(xi[f] - S.at(j, f));
            for (const auto& [dist, j] : misses) miss_diff += std::abs(xi[f] - S.at(j, f));
            w[f] += (miss_diff - hit_diff) * norm;
        }
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (w[a] != w[b]) return w[a] > w[b];
        return a < b;
    });

    RankedFeatureSet out;
    out.scenario = set.scenario;
    out.all_weights = w;
    out.ranked_indices = order;
    out.ranked_names.reserve(d);
    out.weights.reserve(d);
    for (std::size_t f : order) {
        out.ranked_names.push_back(set.feature_names.empty() ? "f" + std::to_string(f)
                                                             : set.feature_names[f]);
        out.weights.push_back(w[f]);
    }
    return out;
}

namespace {

std::set<std::size_t> top_set_of(const RankedFeatureSet& r, std::size_t top_set) {
    std::set<std::size_t> s;
    for (std::size_t i = 0; i < std::min(top_set, r.ranked_indices.size()); ++i)
        s.insert(r.ranked_indices[i]);
    return s;
}

}  // namespace

SelectionResult combine_rankings(const RankedFeatureSet& part1, const RankedFeatureSet& part2,
                                 const RankedFeatureSet& part3, std::size_t top_set,
                                 std::size_t target) {
    const auto s1 = top_set_of(part1, top_set);
    const auto s2 = top_set_of(part2, top_set);
    const auto s3 = top_set_of(part3, top_set);

    auto in = [](const std::set<std::size_t>& s, std::size_t f) { return s.count(f) != 0; };

    // candidate sets per step, in the stated priority order
    std::vector<std::vector<std::size_t>> steps(7);
    std::set<std::size_t> universe;
    for (const auto* s : {&s1, &s2, &s3}) universe.insert(s->begin(), s->end());
    for (std::size_t f : universe) {
        const bool a = in(s1, f), b = in(s2, f), c = in(s3, f);
        int step;
        if (a && b && c) step = 1;
        else if (b && c) step = 2;
        else if (a && c) step = 3;
        else if (a && b) step = 4;
        else if (c) step = 5;
        else if (b) step = 6;
        else step = 7;
        steps[step - 1].push_back(f);
    }

    auto weight_of = [](const RankedFeatureSet& r, std::size_t f) {
        return f < r.all_weights.size() ? r.all_weights[f] : 0.0;
    };

    std::map<std::size_t, std::string> name_of;
    for (std::size_t i = 0; i < part3.ranked_indices.size(); ++i)
        name_of[part3.ranked_indices[i]] = part3.ranked_names[i];

    SelectionResult out;
    for (int step = 1; step <= 7 && out.features.size() < target; ++step) {
        auto& cand = steps[step - 1];
        std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
            const double a3 = weight_of(part3, a), b3 = weight_of(part3, b);
            if (a3 != b3) return a3 > b3;
            const double a2 = weight_of(part2, a), b2 = weight_of(part2, b);
            if (a2 != b2) return a2 > b2;
            const double a1 = weight_of(part1, a), b1 = weight_of(part1, b);
            if (a1 != b1) return a1 > b1;
            return a < b;
        });
        for (std::size_t f : cand) {
            if (out.features.size() >= target) break;
            SelectedFeature sf;
            sf.index = f;
            auto it = name_of.find(f);
            sf.name = it != name_of.end() ? it->second : "f" + std::to_string(f);
            sf.step = step;
            out.features.push_back(sf);
        }
    }

    if (out.features.size() < target)
        throw InputError("combine_rankings: only " + std::to_string(out.features.size())
                         + " features available across the three parts; target "
                         + std::to_string(target) + " (shortfall "
                         + std::to_string(target - out.features.size()) + ")");
    return out;
}

SelectionResult stability_vote(const std::vector<SelectionResult>& trials, int min_votes,
                               std::size_t target) {
    struct Tally {
        std::string name;
        int votes = 0;
        int step_sum = 0;
    };
    std::map<std::size_t, Tally> tally;
    for (const auto& trial : trials) {
        for (const auto& f : trial.features) {
            auto& t = tally[f.index];
            t.name = f.name;
            t.votes += 1;
            t.step_sum += f.step;
        }
    }

    std::vector<std::pair<std::size_t, Tally>> qualified;
    for (const auto& [idx, t] : tally)
        if (t.votes >= min_votes) qualified.emplace_back(idx, t);

    std::stable_sort(qualified.begin(), qualified.end(), [](const auto& a, const auto& b) {
        if (a.second.votes != b.second.votes) return a.second.votes > b.second.votes;
        const double sa = static_cast<double>(a.second.step_sum) / a.second.votes;
        const double sb = static_cast<double>(b.second.step_sum) / b.second.votes;
        if (sa != sb) return sa < sb;
        return a.first < b.first;
    });
    if (qualified.size() > target) qualified.resize(target);

    SelectionResult out;
    for (const auto& [idx, t] : qualified) {
        SelectedFeature sf;
        sf.index = idx;
        sf.name = t.name;
        sf.step = static_cast<int>(std::lround(static_cast<double>(t.step_sum) / t.votes));
        sf.votes = t.votes;
        out.features.push_back(sf);
    }
    return out;
}

SelectionOutcome run_selection(const LabeledMatrix& part1, const LabeledMatrix& part2,
                               const LabeledMatrix& part3, const SelectionParams& params,
                               std::uint64_t seed) {
    const LabeledMatrix* parts[3] = {&part1, &part2, &part3};

    // disjoint draws per scenario, all trials up front
    Rng rng(seed);
    std::vector<std::vector<std::vector<std::size_t>>> draws(3);
    for (int p = 0; p < 3; ++p)
        draws[p] = stratified_disjoint_samples(parts[p]->labels, params.fraction, params.n_trials, rng);

    SelectionOutcome out;
    out.mle_estimates.resize(params.n_trials);
    for (std::size_t t = 0; t < params.n_trials; ++t) {
        std::vector<RankedFeatureSet> ranked(3);
        for (int p = 0; p < 3; ++p) {
            const auto& idx = draws[p][t];
            LabeledMatrix sub;
            sub.scenario = parts[p]->scenario;
            sub.feature_names = parts[p]->feature_names;
            sub.X = Matrix(idx.size(), parts[p]->X.cols);
            sub.labels.resize(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) {
                std::copy_n(parts[p]->X.row(idx[i]), sub.X.cols, sub.X.row(i));
                sub.labels[i] = parts[p]->labels[idx[i]];
            }
            out.mle_estimates[t].push_back(
                intrinsic_dimension_mle(sub.X, params.mle_k_min, params.mle_k_max));
            ranked[p] = relieff_rank(sub, params.k_neighbors);
        }
        out.trials.push_back(
            combine_rankings(ranked[0], ranked[1], ranked[2], params.top_set, params.target));
    }

    out.final = stability_vote(out.trials, params.min_votes, params.target);
    return out;
}

}  // namespace coughband
