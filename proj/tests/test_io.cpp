#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "coughband/config.hpp"
#include "coughband/experiment.hpp"
#include "coughband/feature_table.hpp"
#include "coughband/manifest.hpp"

using namespace coughband;

TEST_CASE("config json roundtrip is lossless") {
    PipelineConfig cfg;
    cfg.short_term.aux.chroma_ref_hz = 442.0;
    cfg.selection.fraction = 0.15;
    cfg.selection.target = 31;
    cfg.representation = Representation::boaw;
    cfg.k_pos = 8;
    cfg.svm.C = 3.5;
    cfg.kernel.coef0 = 0.25;
    cfg.scheme = PartitionScheme::lopo;
    cfg.mode = TrainMode::single;
    cfg.seed = 90210;
    cfg.write_text_features = false;

    const auto text = config_to_json(cfg);
    const auto back = config_from_json(text);
    CHECK(back.short_term.aux.chroma_ref_hz == cfg.short_term.aux.chroma_ref_hz);
    CHECK(back.selection.fraction == cfg.selection.fraction);
    CHECK(back.selection.target == cfg.selection.target);
    CHECK(back.representation == cfg.representation);
    CHECK(back.k_pos == cfg.k_pos);
    CHECK(back.svm.C == cfg.svm.C);
    CHECK(back.kernel.coef0 == cfg.kernel.coef0);
    CHECK(back.scheme == cfg.scheme);
    CHECK(back.mode == cfg.mode);
    CHECK(back.seed == cfg.seed);
    CHECK(back.write_text_features == cfg.write_text_features);

    // a second dump is byte-identical
    CHECK(config_to_json(back) == text);

    save_config("test_config.json", cfg);
    const auto loaded = load_config("test_config.json");
    CHECK(config_to_json(loaded) == text);
}

TEST_CASE("config defaults match the shipped pipeline") {
    PipelineConfig cfg;
    CHECK(cfg.short_term.sample_rate == 11025);
    CHECK(cfg.short_term.frame.frame_len == 825);
    CHECK(cfg.short_term.frame.hop == 617);
    CHECK(cfg.short_term.welch_subframe == 275);
    CHECK(cfg.short_term.band_edges_hz[1] == 500.0);
    CHECK(cfg.short_term.band_edges_hz[5] == 5512.5);
    CHECK(cfg.selection.fraction == 0.10);
    CHECK(cfg.selection.n_trials == 5);
    CHECK(cfg.selection.k_neighbors == 10);
    CHECK(cfg.selection.top_set == 30);
    CHECK(cfg.selection.target == 29);
    CHECK(cfg.selection.min_votes == 3);
    CHECK(cfg.k_pos == 16);
    CHECK(cfg.k_neg == 16);
    CHECK(cfg.svm.C == 1.0);
    CHECK(cfg.svm.balanced_weights);
    CHECK(cfg.kernel.degree == 2);
    CHECK(cfg.kernel.coef0 == 1.0);
    CHECK(cfg.svm.tolerance == 1e-3);
}

TEST_CASE("config parse errors are input errors") {
    CHECK_THROWS_AS(config_from_json("{ not json"), InputError);
    CHECK_THROWS_AS(config_from_json("{\"representation\":{\"type\":\"wavelet\"}}"), InputError);
    CHECK_THROWS_AS(config_from_json("{\"band_edges_hz\":[0,1,2]}"), InputError);
}

TEST_CASE("manifest validation") {
    {
        std::ofstream f("test_manifest.json");
        f << R"([{"wav":"does_not_exist.wav","patient_id":"p1","scenario":"part1"}])";
    }
    CHECK_THROWS_WITH_AS(load_manifest("test_manifest.json"),
                         doctest::Contains("does_not_exist.wav"), InputError);

    {
        std::ofstream f("test_dummy.wav");
        f << "x";
    }
    {
        std::ofstream f("test_manifest.json");
        f << R"([{"wav":"test_dummy.wav","patient_id":"p1","scenario":"part9"}])";
    }
    CHECK_THROWS_WITH_AS(load_manifest("test_manifest.json"), doctest::Contains("part9"),
                         InputError);

    {
        std::ofstream f("test_manifest.json");
        f << R"([{"wav":"test_dummy.wav","patient_id":"p1","scenario":"part2"}])";
    }
    const auto m = load_manifest("test_manifest.json");
    REQUIRE(m.entries.size() == 1);
    CHECK(m.entries[0].scenario == "part2");
    CHECK(m.entries[0].annotation_path.empty());
}

namespace {

FeatureTable make_table(bool labels) {
    FeatureTable t;
    t.source_id = "synthetic.wav";
    t.patient_id = "p07";
    t.scenario = "part2";
    t.columns = {"a", "b", "c"};
    t.features = Matrix(4, 3);
    Rng rng(5);
    for (auto& v : t.features.data) v = rng.normal();
    t.start_times = {0.0, 0.056, 0.112, 0.168};
    if (labels) {
        t.labels = {0, 1, 1, 0};
        t.has_labels = true;
    }
    return t;
}

}  // namespace

TEST_CASE("feature table roundtrip is exact") {
    for (bool labels : {true, false}) {
        auto t = make_table(labels);
        save_feature_table("test_table.ftb", t);
        auto back = load_feature_table("test_table.ftb");
        CHECK(back.source_id == t.source_id);
        CHECK(back.patient_id == t.patient_id);
        CHECK(back.scenario == t.scenario);
        CHECK(back.columns == t.columns);
        CHECK(back.features.data == t.features.data);  // bit exact
        CHECK(back.start_times == t.start_times);
        CHECK(back.has_labels == t.has_labels);
        if (labels) CHECK(back.labels == t.labels);
    }
}

TEST_CASE("feature table detects corruption") {
    auto t = make_table(true);
    save_feature_table("test_table.ftb", t);
    std::ifstream in("test_table.ftb", std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    bytes[bytes.size() / 3] ^= 0x10;
    std::ofstream out("test_table_bad.ftb", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    CHECK_THROWS_WITH_AS(load_feature_table("test_table_bad.ftb"), doctest::Contains("checksum"),
                         InputError);
}

TEST_CASE("pipeline model containers roundtrip") {
    // small trained model over random data
    Rng rng(9);
    Matrix X(60, 4);
    std::vector<int> y(60);
    for (std::size_t i = 0; i < 60; ++i) {
        y[i] = i % 2;
        for (std::size_t f = 0; f < 4; ++f) X.at(i, f) = rng.normal() + (y[i] ? 1.5 : 0.0);
    }

    PipelineModel m;
    m.part_tag = "part2";
    m.representation = Representation::boaw;
    m.selected_names = {"a", "b", "c", "d"};
    m.svm = svm_train(X, y);
    Matrix pos(20, 4), neg(20, 4);
    for (auto& v : pos.data) v = rng.normal();
    for (auto& v : neg.data) v = rng.normal() + 2.0;
    m.codebook = build_codebook(pos, neg, 4, 4, 11);

    save_pipeline_model("test_pm.cbm", m);
    auto back = load_pipeline_model("test_pm.cbm");
    CHECK(back.part_tag == m.part_tag);
    CHECK(back.representation == m.representation);
    CHECK(back.selected_names == m.selected_names);
    REQUIRE(back.codebook.has_value());
    CHECK(back.codebook->words.data == m.codebook->words.data);
    CHECK(back.svm.coefficients == m.svm.coefficients);
    CHECK(back.svm.bias == m.svm.bias);

    // ensemble nests three model blobs
    PipelineEnsemble e;
    for (int i = 0; i < 3; ++i) {
        auto member = m;
        member.part_tag = "part" + std::to_string(i + 1);
        member.representation = Representation::avgsd;
        member.codebook.reset();
        e.members.push_back(member);
    }
    save_pipeline_ensemble("test_ens.cbe", e);
    CHECK(is_ensemble_file("test_ens.cbe"));
    CHECK(!is_ensemble_file("test_pm.cbm"));
    auto eback = load_pipeline_ensemble("test_ens.cbe");
    REQUIRE(eback.members.size() == 3);
    CHECK(eback.members[0].part_tag == "part1");
    CHECK(eback.members[2].part_tag == "part3");
    CHECK(eback.members[1].svm.coefficients == m.svm.coefficients);

    PipelineEnsemble two;
    two.members = {e.members[0], e.members[1]};
    CHECK_THROWS_AS(save_pipeline_ensemble("test_ens2.cbe", two), InputError);
}
