#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "coughband/annotations.hpp"
#include "coughband/common.hpp"
#include "coughband/evaluation.hpp"
#include "oracles.hpp"

using namespace coughband;

namespace {

// stream of n long-term observations with the production span geometry
// (5 frames, stride 4: group g covers frames [4g, 4g+4])
std::vector<StreamObservation> make_stream(std::size_t n, std::size_t base_index) {
    std::vector<StreamObservation> s;
    for (std::size_t g = 0; g < n; ++g)
        s.push_back({base_index + g, static_cast<long>(4 * g), static_cast<long>(4 * g + 4)});
    return s;
}

}  // namespace

TEST_CASE("block5 splits one stream into near-equal contiguous blocks") {
    auto plan = block5_partition({make_stream(10, 0)});
    REQUIRE(plan.folds.size() == 5);
    for (const auto& fold : plan.folds) CHECK(fold.test.size() == 2);

    // 13 observations: 3,3,3,2,2
    plan = block5_partition({make_stream(13, 0)});
    CHECK(plan.folds[0].test.size() == 3);
    CHECK(plan.folds[1].test.size() == 3);
    CHECK(plan.folds[2].test.size() == 3);
    CHECK(plan.folds[3].test.size() == 2);
    CHECK(plan.folds[4].test.size() == 2);
}

TEST_CASE("block5 test sets partition the observations") {
    auto plan = block5_partition({make_stream(23, 0), make_stream(17, 23)});
    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto& fold : plan.folds) {
        for (std::size_t i : fold.test) {
            CHECK(!seen.count(i));
            seen.insert(i);
            ++total;
        }
        // train and test are disjoint
        std::set<std::size_t> test_set(fold.test.begin(), fold.test.end());
        for (std::size_t i : fold.train) CHECK(!test_set.count(i));
    }
    CHECK(total == 40);
}

TEST_CASE("block5 enforces zero train/test frame-span overlap") {
    const auto stream = make_stream(20, 0);
    auto plan = block5_partition({stream});
    for (const auto& fold : plan.folds) {
        for (std::size_t t : fold.test) {
            for (std::size_t r : fold.train) {
                const auto& ot = stream[t];
                const auto& orr = stream[r];
                const bool overlap = ot.span_last >= orr.span_first && ot.span_first <= orr.span_last;
                CHECK(!overlap);
            }
        }
    }
    // adjacent groups share one frame, so each interior cut drops one train group
    CHECK(plan.folds[0].train.size() < 16);
}

TEST_CASE("block5 guard gap drops extra groups") {
    const auto stream = make_stream(30, 0);
    auto plain = block5_partition({stream}, 0);
    auto guarded = block5_partition({stream}, 2);
    for (std::size_t f = 0; f < 5; ++f) {
        CHECK(guarded.folds[f].test == plain.folds[f].test);
        CHECK(guarded.folds[f].train.size() < plain.folds[f].train.size());
    }
}

TEST_CASE("block5 warns and excludes short streams") {
    auto plan = block5_partition({make_stream(3, 0), make_stream(10, 3)});
    REQUIRE(plan.warnings.size() == 1);
    CHECK(plan.warnings[0].find("excluded") != std::string::npos);
    std::size_t covered = 0;
    for (const auto& fold : plan.folds) covered += fold.test.size();
    CHECK(covered == 10);
}

TEST_CASE("lopo builds one fold per patient") {
    std::vector<std::size_t> patient_of_obs;
    for (std::size_t p = 0; p < 13; ++p)
        for (int i = 0; i < 7; ++i) patient_of_obs.push_back(p);

    auto plan = lopo_partition(patient_of_obs);
    REQUIRE(plan.folds.size() == 13);

    std::set<std::size_t> tested;
    for (const auto& fold : plan.folds) {
        CHECK(fold.test.size() == 7);
        const std::size_t patient = patient_of_obs[fold.test.front()];
        for (std::size_t i : fold.test) {
            CHECK(patient_of_obs[i] == patient);
            CHECK(!tested.count(i));
            tested.insert(i);
        }
        for (std::size_t i : fold.train) CHECK(patient_of_obs[i] != patient);
    }
    CHECK(tested.size() == patient_of_obs.size());

    std::vector<std::size_t> single(5, 0);
    CHECK_THROWS_AS(lopo_partition(single), InputError);
}

TEST_CASE("confusion metrics arithmetic") {
    // TP=9, FN=1, TN=8, FP=2
    std::vector<int> labels, preds;
    for (int i = 0; i < 9; ++i) { labels.push_back(1); preds.push_back(1); }
    labels.push_back(1); preds.push_back(0);
    for (int i = 0; i < 8; ++i) { labels.push_back(0); preds.push_back(0); }
    for (int i = 0; i < 2; ++i) { labels.push_back(0); preds.push_back(1); }

    auto c = confusion_metrics(preds, labels);
    CHECK(c.tp == 9);
    CHECK(c.fn == 1);
    CHECK(c.tn == 8);
    CHECK(c.fp == 2);
    CHECK(c.sensitivity() == doctest::Approx(90.0));
    CHECK(c.specificity() == doctest::Approx(80.0));
    CHECK(c.accuracy() == doctest::Approx(85.0));

    auto perfect = confusion_metrics(labels, labels);
    CHECK(perfect.sensitivity() == doctest::Approx(100.0));
    CHECK(perfect.specificity() == doctest::Approx(100.0));
    CHECK(perfect.accuracy() == doctest::Approx(100.0));

    std::vector<int> shorter{1};
    CHECK_THROWS_AS(confusion_metrics(shorter, labels), InputError);
}

TEST_CASE("metrics are permutation invariant") {
    Rng rng(3);
    std::vector<int> labels(200), preds(200);
    for (std::size_t i = 0; i < 200; ++i) {
        labels[i] = rng.uniform() < 0.4;
        preds[i] = rng.uniform() < 0.5;
    }
    auto base = confusion_metrics(preds, labels);

    std::vector<std::size_t> perm(200);
    for (std::size_t i = 0; i < 200; ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<int> labels2(200), preds2(200);
    for (std::size_t i = 0; i < 200; ++i) {
        labels2[i] = labels[perm[i]];
        preds2[i] = preds[perm[i]];
    }
    auto permuted = confusion_metrics(preds2, labels2);
    CHECK(base.tp == permuted.tp);
    CHECK(base.fp == permuted.fp);
    CHECK(base.tn == permuted.tn);
    CHECK(base.fn == permuted.fn);
}

TEST_CASE("roc auc basics") {
    std::vector<double> perfect{0.9, 0.8, 0.2, 0.1};
    std::vector<int> labels{1, 1, 0, 0};
    CHECK(roc_auc(perfect, labels).auc == doctest::Approx(1.0));

    std::vector<double> scores{0.1, 0.4, 0.35, 0.8};
    std::vector<int> labels2{0, 0, 1, 1};
    CHECK(roc_auc(scores, labels2).auc == doctest::Approx(0.75));

    std::vector<int> one_class{1, 1, 1, 1};
    CHECK_THROWS_AS(roc_auc(perfect, one_class), InputError);
}

TEST_CASE("auc of random scores is near one half") {
    Rng rng(7);
    std::vector<double> scores(10000);
    std::vector<int> labels(10000);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = rng.uniform();
        labels[i] = rng.uniform() < 0.5;
    }
    CHECK(roc_auc(scores, labels).auc == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("trapezoid auc equals pair counting, ties included") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 50 + rng.below(100);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            // quantized scores force plenty of ties
            scores[i] = std::floor(rng.uniform() * 8.0) / 8.0;
            labels[i] = rng.uniform() < 0.4;
            (labels[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;

        auto roc = roc_auc(scores, labels);
        CHECK(roc.auc == doctest::Approx(oracle::auc_pairs(scores, labels)).epsilon(1e-9));

        // ROC points are monotone in both coordinates
        for (std::size_t i = 1; i < roc.points.size(); ++i) {
            CHECK(roc.points[i].first >= roc.points[i - 1].first);
            CHECK(roc.points[i].second >= roc.points[i - 1].second);
        }
        CHECK(roc.points.back().first == doctest::Approx(1.0));
        CHECK(roc.points.back().second == doctest::Approx(1.0));
    }
}

TEST_CASE("mcnemar hand cases") {
    // b=10, c=20 -> 2.7
    std::vector<int> labels, pa, pb;
    auto add = [&](int n, bool a_right, bool b_right) {
        for (int i = 0; i < n; ++i) {
            labels.push_back(1);
            pa.push_back(a_right ? 1 : 0);
            pb.push_back(b_right ? 1 : 0);
        }
    };
    add(10, true, false);   // b
    add(20, false, true);   // c
    add(30, true, true);
    auto r = mcnemar_test(pa, pb, labels);
    CHECK(r.b == 10);
    CHECK(r.c == 20);
    CHECK(r.statistic == doctest::Approx(2.7));
    CHECK(r.p_value == doctest::Approx(0.1003).epsilon(0.01));

    // statistic is symmetric in the two classifiers
    auto rs = mcnemar_test(pb, pa, labels);
    CHECK(rs.statistic == doctest::Approx(r.statistic));
    CHECK(rs.b == r.c);

    // b == c: continuity correction clamps to zero
    labels.clear(); pa.clear(); pb.clear();
    add(15, true, false);
    add(15, false, true);
    r = mcnemar_test(pa, pb, labels);
    CHECK(r.statistic == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));

    // b=0, c=40
    labels.clear(); pa.clear(); pb.clear();
    add(40, false, true);
    add(10, true, true);
    r = mcnemar_test(pa, pb, labels);
    CHECK(r.statistic == doctest::Approx(38.025));
    CHECK(r.p_value < 0.01);
    CHECK(r.stars() == "**");

    // no discordant pairs -> p = 1
    labels.clear(); pa.clear(); pb.clear();
    add(20, true, true);
    r = mcnemar_test(pa, pb, labels);
    CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("snr annotation hand cases and injection oracle") {
    // stationary noise with one louder burst
    Rng rng(13);
    AudioSignal rec;
    rec.sample_rate = 11025;
    rec.samples.resize(11025 * 4);
    const double noise_amp = 0.05;
    for (auto& v : rec.samples) v = noise_amp * rng.normal();

    // inject a burst at 5 dB: burst power = noise_power * 10^(5/10)
    const double noise_power = noise_amp * noise_amp;
    const double burst_power = noise_power * std::pow(10.0, 0.5);
    const double burst_amp = std::sqrt(burst_power);
    const std::size_t b0 = 11025, b1 = 11025 + 3307;  // 300 ms
    for (std::size_t i = b0; i < b1; ++i) rec.samples[i] += burst_amp * rng.normal();

    std::vector<AnnotationSpan> spans{{b0 / 11025.0, b1 / 11025.0, "cough"}};
    auto events = snr_annotate(rec, spans);
    REQUIRE(events.size() == 1);
    CHECK(!events[0].negative_excess);
    CHECK(events[0].snr_db == doctest::Approx(5.0).epsilon(0.2));

    // equal-excess case: cough power exactly twice the noise power -> 0 dB
    AudioSignal flat;
    flat.sample_rate = 11025;
    flat.samples.assign(11025, 0.1);
    for (std::size_t i = 4000; i < 5000; ++i)
        flat.samples[i] = 0.1 * std::sqrt(2.0);
    std::vector<AnnotationSpan> flat_spans{{4000.0 / 11025.0, 5000.0 / 11025.0, "cough"}};
    auto flat_events = snr_annotate(flat, flat_spans);
    REQUIRE(flat_events.size() == 1);
    CHECK(flat_events[0].snr_db == doctest::Approx(0.0).epsilon(0.01));

    // cough quieter than surroundings -> flagged sentinel
    AudioSignal quiet = flat;
    for (std::size_t i = 4000; i < 5000; ++i) quiet.samples[i] = 0.01;
    auto quiet_events = snr_annotate(quiet, flat_spans);
    REQUIRE(quiet_events.size() == 1);
    CHECK(quiet_events[0].negative_excess);
    CHECK(std::isinf(quiet_events[0].snr_db));

    // event at the very start has only one noise side
    std::vector<AnnotationSpan> edge_spans{{0.0, 0.1, "cough"}};
    auto edge_events = snr_annotate(flat, edge_spans);
    REQUIRE(edge_events.size() == 1);
    CHECK(edge_events[0].one_sided);
}

TEST_CASE("annotation file roundtrip and frame labelling") {
    std::vector<AnnotationSpan> spans{
        {0.50, 0.85, "cough"},
        {1.20, 1.45, "other"},
        {2.00, 2.33, "cough"},
    };
    write_annotations("test_spans.tsv", spans);
    auto back = read_annotations("test_spans.tsv");
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back[i].start_s == doctest::Approx(spans[i].start_s));
        CHECK(back[i].end_s == doctest::Approx(spans[i].end_s));
        CHECK(back[i].label == spans[i].label);
    }

    // frame covering 60% cough is labelled cough
    AudioSignal sig;
    sig.sample_rate = 11025;
    sig.samples.assign(11025 * 3, 0.0);
    auto frames = frame_signal(sig);
    // frame 0 covers samples [0, 825); make a cough span covering 60% of it
    std::vector<AnnotationSpan> majority{{0.0, 0.6 * 825.0 / 11025.0, "cough"}};
    auto labels = label_frames(frames, majority, 11025);
    CHECK(labels[0] == 1);
    CHECK(labels[1] == 0);

    // 40% coverage stays non-cough
    std::vector<AnnotationSpan> minority{{0.0, 0.4 * 825.0 / 11025.0, "cough"}};
    labels = label_frames(frames, minority, 11025);
    CHECK(labels[0] == 0);
}
