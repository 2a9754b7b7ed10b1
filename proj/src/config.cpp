#include "coughband/config.hpp"

#include <fstream>

#include <json.hpp>

namespace coughband {

using nlohmann::json;

std::string to_string(Representation r) { return r == Representation::avgsd ? "avgsd" : "boaw"; }

Representation representation_from_string(const std::string& s) {
    if (s == "avgsd") return Representation::avgsd;
    if (s == "boaw") return Representation::boaw;
    throw InputError("unknown representation '" + s + "' (expected avgsd or boaw)");
}

std::string to_string(PartitionScheme s) { return s == PartitionScheme::block5 ? "block5" : "lopo"; }

PartitionScheme scheme_from_string(const std::string& s) {
    if (s == "block5") return PartitionScheme::block5;
    if (s == "lopo") return PartitionScheme::lopo;
    throw InputError("unknown partition scheme '" + s + "' (expected block5 or lopo)");
}

std::string to_string(TrainMode m) {
    switch (m) {
        case TrainMode::single: return "single";
        case TrainMode::per_part: return "per-part";
        default: return "ensemble";
    }
}

TrainMode train_mode_from_string(const std::string& s) {
    if (s == "single") return TrainMode::single;
    if (s == "per-part") return TrainMode::per_part;
    if (s == "ensemble") return TrainMode::ensemble;
    throw InputError("unknown train mode '" + s + "' (expected single, per-part or ensemble)");
}

std::string config_to_json(const PipelineConfig& c) {
    json j;
    j["sample_rate"] = c.short_term.sample_rate;
    j["frame_samples"] = c.short_term.frame.frame_len;
    j["hop_samples"] = c.short_term.frame.hop;
    j["welch_subframe"] = c.short_term.welch_subframe;
    j["band_edges_hz"] = c.short_term.band_edges_hz;

    const auto& a = c.short_term.aux;
    j["aux"] = {{"mel_filters", a.mel_filters},
                {"mel_range_hz", {a.mel_lo_hz, a.mel_hi_hz}},
                {"root_power", a.root_power},
                {"dct_keep", a.dct_keep},
                {"logband_range_hz", {a.logband_lo_hz, a.logband_hi_hz}},
                {"logbands", a.logbands},
                {"chroma_ref_hz", a.chroma_ref_hz},
                {"chroma_range_hz", {a.chroma_lo_hz, a.chroma_hi_hz}},
                {"ssch_filters", a.ssch_filters},
                {"ssch_bark_width", a.ssch_bark_width},
                {"ssch_hi_hz", a.ssch_hi_hz},
                {"ssch_bins", a.ssch_bins},
                {"hr_lag_ms", {a.hr_min_lag_ms, a.hr_max_lag_ms}}};

    const auto& s = c.selection;
    j["selection"] = {{"fraction", s.fraction},   {"trials", s.n_trials},
                      {"k_neighbors", s.k_neighbors}, {"top_set", s.top_set},
                      {"n_keep", s.target},       {"min_votes", s.min_votes},
                      {"mle_k", {s.mle_k_min, s.mle_k_max}}};

    j["representation"] = {{"type", to_string(c.representation)},
                           {"k_pos", c.k_pos},
                           {"k_neg", c.k_neg},
                           {"kmeans_max_iter", c.kmeans.max_iterations},
                           {"kmeans_tol", c.kmeans.tolerance}};

    j["svm"] = {{"C", c.svm.C},
                {"balanced_weights", c.svm.balanced_weights},
                {"weight_pos", c.svm.weight_pos},
                {"weight_neg", c.svm.weight_neg},
                {"tolerance", c.svm.tolerance},
                {"max_iterations", c.svm.max_iterations},
                {"cache_mb", c.svm.cache_mb},
                {"standardize", c.svm.standardize},
                {"degree", c.kernel.degree},
                {"gamma", c.kernel.gamma},
                {"coef0", c.kernel.coef0}};

    j["evaluation"] = {{"scheme", to_string(c.scheme)},
                       {"mode", to_string(c.mode)},
                       {"guard_gap", c.guard_gap}};

    j["seed"] = c.seed;
    j["write_text_features"] = c.write_text_features;
    return j.dump(2) + "\n";
}

PipelineConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config parse error: ") + e.what());
    }

    PipelineConfig c;
    try {
        if (j.contains("sample_rate")) c.short_term.sample_rate = j["sample_rate"];
        if (j.contains("frame_samples")) c.short_term.frame.frame_len = j["frame_samples"];
        if (j.contains("hop_samples")) c.short_term.frame.hop = j["hop_samples"];
        if (j.contains("welch_subframe")) c.short_term.welch_subframe = j["welch_subframe"];
        if (j.contains("band_edges_hz")) {
            auto edges = j["band_edges_hz"].get<std::vector<double>>();
            if (edges.size() != kNumBands + 1)
                throw InputError("config: band_edges_hz must list 6 values");
            std::copy(edges.begin(), edges.end(), c.short_term.band_edges_hz.begin());
        }
        if (j.contains("aux")) {
            const auto& ja = j["aux"];
            auto& a = c.short_term.aux;
            if (ja.contains("mel_filters")) a.mel_filters = ja["mel_filters"];
            if (ja.contains("mel_range_hz")) {
                a.mel_lo_hz = ja["mel_range_hz"][0];
                a.mel_hi_hz = ja["mel_range_hz"][1];
            }
            if (ja.contains("root_power")) a.root_power = ja["root_power"];
            if (ja.contains("dct_keep")) a.dct_keep = ja["dct_keep"];
            if (ja.contains("logband_range_hz")) {
                a.logband_lo_hz = ja["logband_range_hz"][0];
                a.logband_hi_hz = ja["logband_range_hz"][1];
            }
            if (ja.contains("logbands")) a.logbands = ja["logbands"];
            if (ja.contains("chroma_ref_hz")) a.chroma_ref_hz = ja["chroma_ref_hz"];
            if (ja.contains("chroma_range_hz")) {
                a.chroma_lo_hz = ja["chroma_range_hz"][0];
                a.chroma_hi_hz = ja["chroma_range_hz"][1];
            }
            if (ja.contains("ssch_filters")) a.ssch_filters = ja["ssch_filters"];
            if (ja.contains("ssch_bark_width")) a.ssch_bark_width = ja["ssch_bark_width"];
            if (ja.contains("ssch_hi_hz")) a.ssch_hi_hz = ja["ssch_hi_hz"];
            if (ja.contains("ssch_bins")) a.ssch_bins = ja["ssch_bins"];
            if (ja.contains("hr_lag_ms")) {
                a.hr_min_lag_ms = ja["hr_lag_ms"][0];
                a.hr_max_lag_ms = ja["hr_lag_ms"][1];
            }
        }
        if (j.contains("selection")) {
            const auto& js = j["selection"];
            auto& s = c.selection;
            if (js.contains("fraction")) s.fraction = js["fraction"];
            if (js.contains("trials")) s.n_trials = js["trials"];
            if (js.contains("k_neighbors")) s.k_neighbors = js["k_neighbors"];
            if (js.contains("top_set")) s.top_set = js["top_set"];
            if (js.contains("n_keep")) s.target = js["n_keep"];
            if (js.contains("min_votes")) s.min_votes = js["min_votes"];
            if (js.contains("mle_k")) {
                s.mle_k_min = js["mle_k"][0];
                s.mle_k_max = js["mle_k"][1];
            }
        }
        if (j.contains("representation")) {
            const auto& jr = j["representation"];
            if (jr.contains("type")) c.representation = representation_from_string(jr["type"]);
            if (jr.contains("k_pos")) c.k_pos = jr["k_pos"];
            if (jr.contains("k_neg")) c.k_neg = jr["k_neg"];
            if (jr.contains("kmeans_max_iter")) c.kmeans.max_iterations = jr["kmeans_max_iter"];
            if (jr.contains("kmeans_tol")) c.kmeans.tolerance = jr["kmeans_tol"];
        }
        if (j.contains("svm")) {
            const auto& jv = j["svm"];
            if (jv.contains("C")) c.svm.C = jv["C"];
            if (jv.contains("balanced_weights")) c.svm.balanced_weights = jv["balanced_weights"];
            if (jv.contains("weight_pos")) c.svm.weight_pos = jv["weight_pos"];
            if (jv.contains("weight_neg")) c.svm.weight_neg = jv["weight_neg"];
            if (jv.contains("tolerance")) c.svm.tolerance = jv["tolerance"];
            if (jv.contains("max_iterations")) c.svm.max_iterations = jv["max_iterations"];
            if (jv.contains("cache_mb")) c.svm.cache_mb = jv["cache_mb"];
            if (jv.contains("standardize")) c.svm.standardize = jv["standardize"];
            if (jv.contains("degree")) c.kernel.degree = jv["degree"];
            if (jv.contains("gamma")) c.kernel.gamma = jv["gamma"];
            if (jv.contains("coef0")) c.kernel.coef0 = jv["coef0"];
        }
        if (j.contains("evaluation")) {
            const auto& je = j["evaluation"];
            if (je.contains("scheme")) c.scheme = scheme_from_string(je["scheme"]);
            if (je.contains("mode")) c.mode = train_mode_from_string(je["mode"]);
            if (je.contains("guard_gap")) c.guard_gap = je["guard_gap"];
        }
        if (j.contains("seed")) c.seed = j["seed"];
        if (j.contains("write_text_features")) c.write_text_features = j["write_text_features"];
    } catch (const json::exception& e) {
        throw InputError(std::string("config field error: ") + e.what());
    }
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return config_from_json(text);
}

void save_config(const std::string& path, const PipelineConfig& config) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot create config file: " + path);
    f << config_to_json(config);
    if (!f) throw InputError("write failed: " + path);
}

}  // namespace coughband
