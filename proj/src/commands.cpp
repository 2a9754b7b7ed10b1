#include "coughband/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "coughband/annotations.hpp"
#include "coughband/pipeline.hpp"

namespace coughband {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string stem_for(const ManifestEntry& e, std::set<std::string>& used) {
    std::string stem = fs::path(e.wav_path).stem().string();
    if (stem.empty()) stem = e.patient_id + "_" + e.scenario;
    std::string candidate = stem;
    int suffix = 1;
    while (!used.insert(candidate).second)
        candidate = stem + "_" + std::to_string(++suffix);
    return candidate;
}

void write_snr_table(const std::string& path, const std::vector<EventSnr>& events) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot create file: " + path);
    f << "event\tstart_s\tend_s\tsnr_db\tflags\n";
    char buf[128];
    for (const auto& ev : events) {
        std::string flags;
        if (ev.negative_excess) flags += "negative_excess;";
        if (ev.one_sided) flags += "one_sided;";
        if (ev.negative_excess)
            std::snprintf(buf, sizeof(buf), "%zu\t%.6f\t%.6f\t-inf\t%s\n", ev.event_index,
                          ev.start_s, ev.end_s, flags.c_str());
        else
            std::snprintf(buf, sizeof(buf), "%zu\t%.6f\t%.6f\t%.3f\t%s\n", ev.event_index,
                          ev.start_s, ev.end_s, ev.snr_db, flags.c_str());
        f << buf;
    }
}

}  // namespace

ExtractResult cmd_extract(const std::string& manifest_path, const CommandContext& ctx,
                          bool snr_table) {
    const auto manifest = load_manifest(manifest_path);
    ExtractResult result;
    if (manifest.entries.empty()) {
        result.diagnostics.push_back("manifest is empty; nothing to extract");
        return result;
    }

    const fs::path out_dir = fs::path(ctx.output_dir) / "features";
    fs::create_directories(out_dir);

    const ShortTermExtractor extractor(ctx.config.short_term);
    json index = json::array();
    std::set<std::string> used_stems;

    for (const auto& entry : manifest.entries) {
        const std::string stem = stem_for(entry, used_stems);
        try {
            const AudioSignal audio = ingest_audio(entry.wav_path);
            const auto st = extract_short_term(audio, extractor, ctx.jobs);

            FeatureTable table;
            table.source_id = entry.wav_path;
            table.patient_id = entry.patient_id;
            table.scenario = entry.scenario;
            table.columns = short_term_feature_names();
            table.features = st.features;
            table.start_times = st.start_times;
            if (!entry.annotation_path.empty()) {
                const auto spans = read_annotations(entry.annotation_path);
                table.labels = label_frames(st.frames, spans, audio.sample_rate,
                                            ctx.config.short_term.frame.frame_len);
                table.has_labels = true;
                if (snr_table)
                    write_snr_table((out_dir / (stem + "_snr.tsv")).string(),
                                    snr_annotate(audio, spans));
            }

            const std::string ftb_path = (out_dir / (stem + ".ftb")).string();
            save_feature_table(ftb_path, table);
            if (ctx.config.write_text_features)
                save_feature_table_tsv((out_dir / (stem + ".tsv")).string(), table);

            index.push_back({{"feature_file", ftb_path},
                             {"patient_id", entry.patient_id},
                             {"scenario", entry.scenario},
                             {"source", entry.wav_path}});
            ++result.n_ok;
        } catch (const std::exception& e) {
            result.diagnostics.push_back(entry.wav_path + ": " + e.what());
            ++result.n_failed;
        }
    }

    result.index_path = (out_dir / "index.json").string();
    {
        const std::string tmp = result.index_path + ".tmp";
        std::ofstream f(tmp);
        if (!f) throw InputError("cannot create index: " + tmp);
        f << index.dump(2) << "\n";
        if (!f) throw InputError("write failed: " + tmp);
        f.close();
        fs::rename(tmp, result.index_path);
    }
    return result;
}

std::vector<FeatureTable> load_tables_from_index(const std::string& index_path) {
    std::ifstream f(index_path);
    if (!f)
        throw InputError("cannot open feature index: " + index_path
                         + " (run the extract stage first)");
    json index;
    try {
        f >> index;
    } catch (const json::parse_error& e) {
        throw InputError(index_path + ": index parse error: " + e.what());
    }
    std::vector<FeatureTable> tables;
    for (const auto& je : index) {
        auto table = load_feature_table(je.at("feature_file").get<std::string>());
        table.patient_id = je.at("patient_id").get<std::string>();
        table.scenario = je.at("scenario").get<std::string>();
        tables.push_back(std::move(table));
    }
    return tables;
}

namespace {

LabeledMatrix scenario_matrix(const std::vector<FeatureTable>& tables, const std::string& scenario) {
    LabeledMatrix m;
    m.scenario = scenario;
    std::size_t rows = 0, cols = 0;
    for (const auto& t : tables)
        if (t.scenario == scenario) {
            if (!t.has_labels)
                throw InputError("selection requires labelled features, but " + t.source_id
                                 + " was extracted without annotations");
            rows += t.rows();
            cols = t.features.cols;
            if (m.feature_names.empty()) m.feature_names = t.columns;
        }
    if (rows == 0) throw InputError("no extracted features for scenario " + scenario);
    m.X = Matrix(rows, cols);
    m.labels.reserve(rows);
    std::size_t r = 0;
    for (const auto& t : tables) {
        if (t.scenario != scenario) continue;
        for (std::size_t i = 0; i < t.rows(); ++i, ++r) {
            std::copy_n(t.features.row(i), cols, m.X.row(r));
            m.labels.push_back(t.labels[i]);
        }
    }
    return m;
}

}  // namespace

SelectResult cmd_select(const std::string& index_path, const CommandContext& ctx) {
    const auto tables = load_tables_from_index(index_path);
    const auto part1 = scenario_matrix(tables, "part1");
    const auto part2 = scenario_matrix(tables, "part2");
    const auto part3 = scenario_matrix(tables, "part3");

    SelectResult result;
    result.outcome = run_selection(part1, part2, part3, ctx.config.selection, ctx.config.seed);

    fs::create_directories(ctx.output_dir);
    result.selection_path = (fs::path(ctx.output_dir) / "selection.json").string();
    result.report_path = (fs::path(ctx.output_dir) / "selection_report.txt").string();

    json j;
    j["selected"] = json::array();
    for (const auto& f : result.outcome.final.features)
        j["selected"].push_back(
            {{"name", f.name}, {"index", f.index}, {"step", f.step}, {"votes", f.votes}});
    j["mle_estimates"] = result.outcome.mle_estimates;
    j["seed"] = ctx.config.seed;
    {
        std::ofstream f(result.selection_path);
        if (!f) throw InputError("cannot create " + result.selection_path);
        f << j.dump(2) << "\n";
    }

    // human-readable table
    std::ofstream rep(result.report_path);
    if (!rep) throw InputError("cannot create " + result.report_path);
    rep << "selected features (" << result.outcome.final.features.size() << ")\n";
    rep << "name                     index  step  votes\n";
    char buf[128];
    for (const auto& f : result.outcome.final.features) {
        std::snprintf(buf, sizeof(buf), "%-24s %5zu %5d %6d\n", f.name.c_str(), f.index, f.step,
                      f.votes);
        rep << buf;
    }
    rep << "\nintrinsic dimension (MLE), per trial and scenario:\n";
    for (std::size_t t = 0; t < result.outcome.mle_estimates.size(); ++t) {
        rep << "trial " << t + 1 << ":";
        for (double v : result.outcome.mle_estimates[t]) {
            std::snprintf(buf, sizeof(buf), " %.2f", v);
            rep << buf;
        }
        rep << "\n";
    }
    return result;
}

std::vector<std::size_t> load_selection_indices(const std::string& selection_path) {
    std::ifstream f(selection_path);
    if (!f)
        throw InputError("cannot open selection file: " + selection_path
                         + " (run the select stage first)");
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw InputError(selection_path + ": parse error: " + e.what());
    }
    std::vector<std::size_t> indices;
    for (const auto& je : j.at("selected")) indices.push_back(je.at("index").get<std::size_t>());
    return indices;
}

namespace {

GroupedDataset dataset_from_index(const std::string& index_path,
                                  const std::string& selection_path) {
    const auto tables = load_tables_from_index(index_path);
    std::vector<std::size_t> keep;
    if (!selection_path.empty()) keep = load_selection_indices(selection_path);
    return build_grouped_dataset(tables, keep);
}

std::vector<std::size_t> all_group_ids(const GroupedDataset& data) {
    std::vector<std::size_t> ids(data.groups.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    return ids;
}

std::vector<std::size_t> scenario_group_ids(const GroupedDataset& data, std::size_t scenario) {
    std::vector<std::size_t> ids;
    for (std::size_t g = 0; g < data.groups.size(); ++g)
        if (data.scenario_of(g) == scenario) ids.push_back(g);
    return ids;
}

}  // namespace

namespace {

void note_dropped_features(const PipelineModel& model, std::vector<std::string>& warnings) {
    const std::size_t n = model.selected_names.size();
    std::string names;
    for (std::size_t f = 0; f < model.svm.standardizer.dropped.size(); ++f) {
        if (!model.svm.standardizer.dropped[f]) continue;
        if (!names.empty()) names += ", ";
        if (model.representation == Representation::avgsd && n > 0 && f < 2 * n)
            names += (f < n ? "avg_" : "sd_") + model.selected_names[f % n];
        else
            names += "component " + std::to_string(f);
    }
    if (!names.empty())
        warnings.push_back("model " + model.part_tag
                           + ": constant feature(s) dropped by the standardizer: " + names);
}

}  // namespace

TrainResult cmd_train(const std::string& index_path, const std::string& selection_path,
                      const CommandContext& ctx) {
    const auto data = dataset_from_index(index_path, selection_path);
    if (!data.has_labels)
        throw InputError("training requires labelled features; extract with annotations first");

    const fs::path out_dir = fs::path(ctx.output_dir) / "models";
    fs::create_directories(out_dir);

    TrainResult result;
    if (ctx.config.mode == TrainMode::single) {
        const auto model = train_pipeline_model(data, all_group_ids(data), ctx.config, "all");
        note_dropped_features(model, result.warnings);
        const std::string path = (out_dir / "model_all.cbm").string();
        save_pipeline_model(path, model);
        result.model_paths.push_back(path);
        return result;
    }

    PipelineEnsemble ensemble;
    for (std::size_t s = 0; s < 3; ++s) {
        const std::string tag = "part" + std::to_string(s + 1);
        const auto ids = scenario_group_ids(data, s);
        if (ids.empty()) throw InputError("no training data for scenario " + tag);
        ensemble.members.push_back(train_pipeline_model(data, ids, ctx.config, tag));
        note_dropped_features(ensemble.members.back(), result.warnings);
    }

    if (ctx.config.mode == TrainMode::per_part) {
        for (const auto& m : ensemble.members) {
            const std::string path = (out_dir / ("model_" + m.part_tag + ".cbm")).string();
            save_pipeline_model(path, m);
            result.model_paths.push_back(path);
        }
    } else {
        const std::string path = (out_dir / "ensemble.cbe").string();
        save_pipeline_ensemble(path, ensemble);
        result.model_paths.push_back(path);
    }
    return result;
}

namespace {

std::vector<std::size_t> map_selected_names(const std::vector<std::string>& wanted,
                                            const std::vector<std::string>& columns) {
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < columns.size(); ++i) pos[columns[i]] = i;
    std::vector<std::size_t> keep;
    for (const auto& name : wanted) {
        auto it = pos.find(name);
        if (it == pos.end())
            throw InputError("model expects feature '" + name
                             + "' which the feature table does not provide (model dim "
                             + std::to_string(wanted.size()) + ", table has "
                             + std::to_string(columns.size()) + " columns)");
        keep.push_back(it->second);
    }
    return keep;
}

std::vector<FeatureTable> load_feature_input(const std::string& features_path) {
    if (features_path.size() > 4 && features_path.substr(features_path.size() - 4) == ".ftb")
        return {load_feature_table(features_path)};
    return load_tables_from_index(features_path);
}

}  // namespace

PredictResult cmd_predict(const std::string& model_path, const std::string& features_path,
                          const CommandContext& ctx) {
    std::vector<PipelineModel> models;
    bool ensemble = is_ensemble_file(model_path);
    if (ensemble) {
        auto e = load_pipeline_ensemble(model_path);
        models = std::move(e.members);
    } else {
        models.push_back(load_pipeline_model(model_path));
    }

    const auto tables = load_feature_input(features_path);
    if (tables.empty()) throw InputError("no feature tables in " + features_path);
    const auto keep = map_selected_names(models[0].selected_names, tables[0].columns);
    const auto data = build_grouped_dataset(tables, keep);

    fs::create_directories(ctx.output_dir);
    PredictResult result;
    result.predictions_path = (fs::path(ctx.output_dir) / "predictions.tsv").string();
    std::ofstream f(result.predictions_path);
    if (!f) throw InputError("cannot create " + result.predictions_path);
    f << "source\tgroup\tstart_s\tend_s\tlabel\tscore\ttruth\n";

    char buf[512];
    for (std::size_t g = 0; g < data.groups.size(); ++g) {
        const auto frames = data.group_frames(g);
        double score = 0.0;
        int label;
        if (ensemble) {
            std::array<int, 3> votes{};
            for (std::size_t m = 0; m < 3; ++m) {
                const double s = models[m].score(frames);
                votes[m] = s > 0.0 ? 1 : 0;
                score += s / 3.0;
            }
            label = ensemble_vote(votes);
        } else {
            score = models[0].score(frames);
            label = score > 0.0 ? 1 : 0;
        }
        const auto& grp = data.groups[g];
        std::snprintf(buf, sizeof(buf), "%s\t%zu\t%.6f\t%.6f\t%d\t%.9g\t%d\n",
                      data.stream_source[grp.stream].c_str(), g, grp.start_s, grp.end_s, label,
                      score, data.has_labels ? grp.label : -1);
        f << buf;
        ++result.n_groups;
    }
    return result;
}

EvaluateResult cmd_evaluate(const std::string& index_path, const std::string& selection_path,
                            const CommandContext& ctx, const std::string& compare_predictions) {
    const auto data = dataset_from_index(index_path, selection_path);
    EvaluateResult result;
    result.report = run_experiment(data, ctx.config);

    fs::create_directories(ctx.output_dir);
    const fs::path out(ctx.output_dir);
    result.report_text_path = (out / "report.txt").string();
    result.report_json_path = (out / "report.json").string();
    result.roc_path = (out / "roc.tsv").string();
    result.predictions_path = (out / "predictions.tsv").string();

    std::string text = report_to_text(result.report);

    // optional paired comparison against a previous run's predictions
    if (!compare_predictions.empty()) {
        std::ifstream cf(compare_predictions);
        if (!cf) throw InputError("cannot open comparison predictions: " + compare_predictions);
        std::map<std::pair<std::string, std::size_t>, int> other;
        std::string line;
        std::getline(cf, line);  // header
        while (std::getline(cf, line)) {
            std::string source;
            std::size_t group;
            double start, end, score;
            int label, truth;
            char src_buf[400];
            if (std::sscanf(line.c_str(), "%399[^\t]\t%zu\t%lf\t%lf\t%d\t%lf\t%d", src_buf, &group,
                            &start, &end, &label, &score, &truth) == 7) {
                source = src_buf;
                other[{source, group}] = label;
            }
        }
        std::vector<int> pred_a, pred_b, labels;
        for (std::size_t g = 0; g < data.groups.size(); ++g) {
            if (!result.report.tested[g]) continue;
            const auto key = std::make_pair(data.stream_source[data.groups[g].stream], g);
            auto it = other.find(key);
            if (it == other.end())
                throw InputError("comparison predictions do not cover observation "
                                 + key.first + " group " + std::to_string(g));
            pred_a.push_back(result.report.predictions[g]);
            pred_b.push_back(it->second);
            labels.push_back(result.report.labels[g]);
        }
        const auto mc = mcnemar_test(pred_a, pred_b, labels);
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "mcnemar vs %s: b=%zu c=%zu statistic=%.4f p=%.4g %s\n",
                      compare_predictions.c_str(), mc.b, mc.c, mc.statistic, mc.p_value,
                      mc.stars().c_str());
        result.mcnemar_summary = buf;
        text += result.mcnemar_summary;
    }

    {
        std::ofstream f(result.report_text_path);
        f << text;
    }
    {
        std::ofstream f(result.report_json_path);
        f << report_to_json(result.report);
    }
    {
        std::ofstream f(result.roc_path);
        f << "fpr\ttpr\n";
        char buf[64];
        for (const auto& [fpr, tpr] : result.report.roc.points) {
            std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\n", fpr, tpr);
            f << buf;
        }
    }
    {
        std::ofstream f(result.predictions_path);
        f << "source\tgroup\tstart_s\tend_s\tlabel\tscore\ttruth\n";
        char buf[512];
        for (std::size_t g = 0; g < data.groups.size(); ++g) {
            if (!result.report.tested[g]) continue;
            const auto& grp = data.groups[g];
            std::snprintf(buf, sizeof(buf), "%s\t%zu\t%.6f\t%.6f\t%d\t%.9g\t%d\n",
                          data.stream_source[grp.stream].c_str(), g, grp.start_s, grp.end_s,
                          result.report.predictions[g], result.report.scores[g],
                          result.report.labels[g]);
            f << buf;
        }
    }
    return result;
}

SynthResult cmd_synth(const SynthConfig& synth_config, const CommandContext& ctx) {
    SynthResult result;
    result.manifest_path = generate_corpus(ctx.output_dir, synth_config);
    result.config_path = (fs::path(ctx.output_dir) / "pipeline_config.json").string();
    save_config(result.config_path, ctx.config);
    return result;
}

}  // namespace coughband
