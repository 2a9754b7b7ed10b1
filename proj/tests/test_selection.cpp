#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "coughband/selection.hpp"

using namespace coughband;

namespace {

std::vector<std::string> make_names(std::size_t d) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < d; ++i) names.push_back("f" + std::to_string(i));
    return names;
}

// two-class set: `informative` features get a class-dependent mean shift,
// the rest are pure noise
LabeledMatrix make_synthetic(std::size_t n, std::size_t d, const std::set<std::size_t>& informative,
                             double shift, std::uint64_t seed, double pos_ratio = 0.3) {
    LabeledMatrix set;
    set.scenario = "synthetic";
    set.feature_names = make_names(d);
    set.X = Matrix(n, d);
    set.labels.resize(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const int y = rng.uniform() < pos_ratio ? 1 : 0;
        set.labels[i] = y;
        for (std::size_t f = 0; f < d; ++f) {
            double v = rng.normal();
            if (y == 1 && informative.count(f)) v += shift;
            set.X.at(i, f) = v;
        }
    }
    return set;
}

RankedFeatureSet fake_ranking(const std::vector<std::size_t>& order, std::size_t d,
                              const std::string& scenario) {
    RankedFeatureSet r;
    r.scenario = scenario;
    r.all_weights.assign(d, 0.0);
    double w = 1.0;
    for (std::size_t f : order) {
        r.ranked_indices.push_back(f);
        r.ranked_names.push_back("f" + std::to_string(f));
        r.weights.push_back(w);
        r.all_weights[f] = w;
        w -= 1.0 / (2.0 * order.size());
    }
    return r;
}

}  // namespace

TEST_CASE("stratified sample keeps class ratio and is deterministic") {
    std::vector<int> labels(1000, 0);
    for (std::size_t i = 0; i < 100; ++i) labels[i * 10] = 1;  // 100 pos / 900 neg

    Rng rng1(99), rng2(99);
    auto a = stratified_sample(labels, 0.10, rng1);
    auto b = stratified_sample(labels, 0.10, rng2);
    CHECK(a == b);

    std::size_t pos = 0, neg = 0;
    for (std::size_t i : a) (labels[i] == 1 ? pos : neg)++;
    CHECK(pos == 10);
    CHECK(neg == 90);
}

TEST_CASE("five disjoint draws cover half the data") {
    std::vector<int> labels(1000, 0);
    for (std::size_t i = 0; i < 200; ++i) labels[i] = 1;

    Rng rng(7);
    auto draws = stratified_disjoint_samples(labels, 0.10, 5, rng);
    REQUIRE(draws.size() == 5);

    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto& d : draws) {
        CHECK(d.size() == 100);
        total += d.size();
        for (std::size_t i : d) {
            CHECK(!seen.count(i));  // pairwise disjoint
            seen.insert(i);
        }
    }
    CHECK(total == 500);
}

TEST_CASE("stratified sample errors name the class") {
    std::vector<int> labels(50, 0);
    labels[0] = 1;  // one positive only
    Rng rng(1);
    CHECK_THROWS_WITH_AS(stratified_sample(labels, 0.10, rng),
                         doctest::Contains("positive"), InputError);
}

TEST_CASE("intrinsic dimension: 1-D line embedded in 10-D") {
    Rng rng(17);
    Matrix X(400, 10);
    for (std::size_t i = 0; i < X.rows; ++i) {
        const double t = rng.uniform(-5.0, 5.0);
        for (std::size_t f = 0; f < 10; ++f) X.at(i, f) = t * (0.3 + 0.1 * f);
    }
    const double est = intrinsic_dimension_mle(X);
    CHECK(est >= 0.8);
    CHECK(est <= 1.3);
}

TEST_CASE("intrinsic dimension: 3-D cube embedded in 20-D") {
    Rng rng(19);
    Matrix X(600, 20);
    for (std::size_t i = 0; i < X.rows; ++i) {
        const double a = rng.uniform(), b = rng.uniform(), c = rng.uniform();
        for (std::size_t f = 0; f < 20; ++f)
            X.at(i, f) = a * std::sin(0.5 * f) + b * std::cos(0.3 * f + 1.0) + c * (0.05 * f - 0.4);
    }
    const double est = intrinsic_dimension_mle(X);
    CHECK(est >= 2.5);
    CHECK(est <= 3.6);
}

TEST_CASE("intrinsic dimension handles duplicates") {
    Rng rng(23);
    Matrix X(100, 4);
    for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t f = 0; f < 4; ++f) X.at(i, f) = rng.normal();
    for (std::size_t i = 50; i < 100; ++i)
        std::copy_n(X.row(i - 50), 4, X.row(i));  // every point duplicated once
    CHECK_NOTHROW(intrinsic_dimension_mle(X));

    Matrix all_same(40, 4, 1.0);
    CHECK_THROWS_AS(intrinsic_dimension_mle(all_same), InputError);
}

TEST_CASE("relieff ranks a separating feature first") {
    auto set = make_synthetic(500, 10, {3}, 3.0, 31);
    auto ranked = relieff_rank(set, 10);
    CHECK(ranked.ranked_indices[0] == 3);
    CHECK(ranked.weights[0] > 0.1);

    // weights are non-increasing and within [-1, 1]
    for (std::size_t i = 0; i < ranked.weights.size(); ++i) {
        CHECK(ranked.weights[i] <= 1.0);
        CHECK(ranked.weights[i] >= -1.0);
        if (i > 0) CHECK(ranked.weights[i] <= ranked.weights[i - 1]);
    }
}

TEST_CASE("relieff: uninformative feature weighs near zero") {
    auto set = make_synthetic(500, 10, {0}, 2.0, 37);
    // feature 5 stays identical across classes by construction (noise)
    auto ranked = relieff_rank(set, 10);
    CHECK(std::abs(ranked.all_weights[5]) < 0.05);

    // constant feature gets weight exactly 0
    for (std::size_t i = 0; i < set.X.rows; ++i) set.X.at(i, 7) = 4.2;
    ranked = relieff_rank(set, 10);
    CHECK(ranked.all_weights[7] == 0.0);
}

TEST_CASE("relieff: duplicated informative feature gets equal weight") {
    auto set = make_synthetic(400, 8, {2}, 2.0, 41);
    for (std::size_t i = 0; i < set.X.rows; ++i) set.X.at(i, 6) = set.X.at(i, 2);
    auto ranked = relieff_rank(set, 10);
    CHECK(ranked.all_weights[6] == doctest::Approx(ranked.all_weights[2]).epsilon(1e-9));
}

TEST_CASE("relieff: affine rescaling of one feature keeps its rank") {
    auto set = make_synthetic(300, 6, {1}, 2.0, 43);
    auto before = relieff_rank(set, 10);
    for (std::size_t i = 0; i < set.X.rows; ++i) set.X.at(i, 1) = 100.0 + 7.5 * set.X.at(i, 1);
    auto after = relieff_rank(set, 10);
    CHECK(before.ranked_indices == after.ranked_indices);
    for (std::size_t f = 0; f < 6; ++f)
        CHECK(before.all_weights[f] == doctest::Approx(after.all_weights[f]).epsilon(1e-9));
}

TEST_CASE("relieff rejects oversized k") {
    auto set = make_synthetic(30, 4, {0}, 1.0, 47, 0.5);
    CHECK_THROWS_AS(relieff_rank(set, 25), InputError);
}

TEST_CASE("combine: three identical sets admit everything at step 1") {
    std::vector<std::size_t> order(40);
    for (std::size_t i = 0; i < 40; ++i) order[i] = i;
    auto r = fake_ranking(order, 40, "p");
    auto sel = combine_rankings(r, r, r, 30, 29);
    REQUIRE(sel.features.size() == 29);
    for (const auto& f : sel.features) {
        CHECK(f.step == 1);
        CHECK(f.index < 30);
    }
}

TEST_CASE("combine: pairwise-disjoint sets fall through to part 3") {
    std::vector<std::size_t> o1, o2, o3;
    for (std::size_t i = 0; i < 30; ++i) {
        o1.push_back(i);
        o2.push_back(30 + i);
        o3.push_back(60 + i);
    }
    auto sel = combine_rankings(fake_ranking(o1, 90, "p1"), fake_ranking(o2, 90, "p2"),
                                fake_ranking(o3, 90, "p3"), 30, 29);
    REQUIRE(sel.features.size() == 29);
    for (const auto& f : sel.features) {
        CHECK(f.step == 5);  // only-in-part-3
        CHECK(f.index >= 60);
    }
    // ordered by part-3 weight: the top 29 of part 3's 30
    CHECK(sel.features[0].index == 60);
}

TEST_CASE("combine: stops inside step 2 at exactly 29") {
    // |n123| = 20 shared by all three; 9 more shared only by parts 2 and 3
    std::vector<std::size_t> common, extra23, rest1, rest2, rest3;
    for (std::size_t i = 0; i < 20; ++i) common.push_back(i);
    for (std::size_t i = 20; i < 29; ++i) extra23.push_back(i);
    for (std::size_t i = 40; i < 50; ++i) rest1.push_back(i);
    for (std::size_t i = 50; i < 51; ++i) rest2.push_back(i);
    for (std::size_t i = 60; i < 61; ++i) rest3.push_back(i);

    auto cat = [](std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    auto o1 = cat(common, rest1);                 // 30 entries
    auto o2 = cat(cat(common, extra23), rest2);   // 30 entries
    auto o3 = cat(cat(common, extra23), rest3);   // 30 entries

    auto sel = combine_rankings(fake_ranking(o1, 70, "p1"), fake_ranking(o2, 70, "p2"),
                                fake_ranking(o3, 70, "p3"), 30, 29);
    REQUIRE(sel.features.size() == 29);
    std::size_t step1 = 0, step2 = 0;
    for (const auto& f : sel.features) {
        if (f.step == 1) ++step1;
        if (f.step == 2) ++step2;
    }
    CHECK(step1 == 20);
    CHECK(step2 == 9);
}

TEST_CASE("combine errors when the union is short") {
    std::vector<std::size_t> tiny{0, 1, 2};
    auto r = fake_ranking(tiny, 10, "p");
    CHECK_THROWS_WITH_AS(combine_rankings(r, r, r, 30, 29), doctest::Contains("shortfall"),
                         InputError);
}

TEST_CASE("stability vote thresholds and ordering") {
    // 20 features in all 5 trials, 4 in four, 5 in three, 2 in two
    auto make_result = [](const std::vector<std::size_t>& idx) {
        SelectionResult r;
        for (std::size_t f : idx) r.features.push_back({"f" + std::to_string(f), f, 1, 0});
        return r;
    };
    std::vector<std::size_t> base;
    for (std::size_t i = 0; i < 20; ++i) base.push_back(i);

    std::vector<SelectionResult> trials;
    for (int t = 0; t < 5; ++t) {
        auto idx = base;
        for (std::size_t i = 20; i < 24; ++i)
            if (t < 4) idx.push_back(i);  // 4 features, 4 votes
        for (std::size_t i = 24; i < 29; ++i)
            if (t < 3) idx.push_back(i);  // 5 features, 3 votes
        for (std::size_t i = 29; i < 31; ++i)
            if (t < 2) idx.push_back(i);  // 2 features, 2 votes -> excluded
        trials.push_back(make_result(idx));
    }

    auto final = stability_vote(trials, 3, 29);
    REQUIRE(final.features.size() == 29);
    for (const auto& f : final.features) {
        CHECK(f.votes >= 3);
        CHECK(f.index < 29);
    }
    // five-vote features come first
    for (std::size_t i = 0; i < 20; ++i) CHECK(final.features[i].votes == 5);
}

TEST_CASE("stability vote is idempotent") {
    SelectionResult r;
    for (std::size_t f = 0; f < 29; ++f) r.features.push_back({"f" + std::to_string(f), f, 2, 0});
    std::vector<SelectionResult> five(5, r);
    auto voted = stability_vote(five, 3, 29);
    REQUIRE(voted.features.size() == 29);
    for (std::size_t i = 0; i < 29; ++i) {
        CHECK(voted.features[i].index == r.features[i].index);
        CHECK(voted.features[i].votes == 5);
    }
}

TEST_CASE("full selection pipeline recovers planted features") {
    std::set<std::size_t> planted;
    for (std::size_t f = 0; f < 29; ++f) planted.insert(f * 4);  // spread across the space

    // three scenarios with increasing noise on top of the same class structure
    auto p1 = make_synthetic(2000, 117, planted, 1.5, 101);
    auto p2 = make_synthetic(2000, 117, planted, 1.5, 102);
    auto p3 = make_synthetic(2000, 117, planted, 1.5, 103);
    p1.scenario = "part1";
    p2.scenario = "part2";
    p3.scenario = "part3";

    SelectionParams params;
    auto outcome = run_selection(p1, p2, p3, params, 4242);
    REQUIRE(outcome.final.features.size() == 29);

    std::size_t recovered = 0;
    for (const auto& f : outcome.final.features)
        if (planted.count(f.index)) ++recovered;
    CHECK(recovered >= 26);

    // deterministic under the same seed
    auto outcome2 = run_selection(p1, p2, p3, params, 4242);
    REQUIRE(outcome2.final.features.size() == outcome.final.features.size());
    for (std::size_t i = 0; i < outcome.final.features.size(); ++i)
        CHECK(outcome2.final.features[i].index == outcome.final.features[i].index);
}
