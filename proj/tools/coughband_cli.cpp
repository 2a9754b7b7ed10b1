// coughband: band-specific audio features + SVM pipeline for cough detection.
//
// Exit codes: 0 success, 1 usage error, 2 input/data error, 3 internal error.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "coughband/commands.hpp"

using namespace coughband;

int main(int argc, char** argv) {
    CLI::App app{"cough detection toolkit: band-limited spectral features, "
                 "feature selection, long-term representations and poly-2 SVM"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::string output_dir = ".";
    int jobs = 0;
    long long seed = -1;
    app.add_option("--config", config_path, "pipeline config JSON (defaults used when omitted)");
    app.add_option("--output-dir", output_dir, "directory for generated artifacts");
    app.add_option("--jobs", jobs, "worker threads (0 = all cores)");
    app.add_option("--seed", seed, "override the config seed");

    // synth
    auto* synth = app.add_subcommand("synth", "generate the synthetic 3-scenario corpus");
    SynthConfig synth_cfg;
    synth->add_option("--patients", synth_cfg.n_patients, "synthetic patients per scenario");
    synth->add_option("--coughs", synth_cfg.coughs_per_recording, "cough bursts per recording");
    synth->add_option("--others", synth_cfg.others_per_recording,
                      "non-cough foreground events per recording");
    synth->add_option("--duration", synth_cfg.duration_s, "recording length in seconds");
    synth->add_option("--snr", synth_cfg.scenario_snr_db,
                      "per-scenario event SNR in dB (3 values, part1..part3)")
        ->expected(3);
    synth->add_option("--sample-rate", synth_cfg.sample_rate, "output rate (44100 or 11025)");

    // extract
    auto* extract = app.add_subcommand("extract", "compute short-term features for a manifest");
    std::string manifest_path;
    bool snr_table = false;
    extract->add_option("--manifest", manifest_path, "dataset manifest JSON")->required();
    extract->add_flag("--snr", snr_table, "also write per-event SNR tables");

    // select
    auto* select = app.add_subcommand("select", "run the noise-robust feature selection");
    std::string index_path;
    select->add_option("--features", index_path, "extract index.json")->required();

    // train
    auto* train = app.add_subcommand("train", "train SVM model(s) on extracted features");
    std::string train_index, selection_path, mode_str, rep_str;
    train->add_option("--features", train_index, "extract index.json")->required();
    train->add_option("--selection", selection_path, "selection.json from the select stage");
    train->add_option("--mode", mode_str, "single | per-part | ensemble");
    train->add_option("--representation", rep_str, "avgsd | boaw");

    // predict
    auto* predict = app.add_subcommand("predict", "label long-term frames with a trained model");
    std::string model_path, features_path;
    predict->add_option("--model", model_path, "model (.cbm) or ensemble (.cbe) file")->required();
    predict->add_option("--features", features_path, "extract index.json or a single .ftb")
        ->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "cross-validated evaluation with reports");
    std::string eval_index, eval_selection, eval_scheme, eval_mode, eval_rep, compare_path;
    evaluate->add_option("--features", eval_index, "extract index.json")->required();
    evaluate->add_option("--selection", eval_selection, "selection.json from the select stage");
    evaluate->add_option("--scheme", eval_scheme, "block5 | lopo");
    evaluate->add_option("--mode", eval_mode, "single | per-part | ensemble");
    evaluate->add_option("--representation", eval_rep, "avgsd | boaw");
    evaluate->add_option("--compare", compare_path,
                         "predictions.tsv of another run for McNemar's test");

    CLI11_PARSE(app, argc, argv);

    try {
        CommandContext ctx;
        if (!config_path.empty()) ctx.config = load_config(config_path);
        if (seed >= 0) ctx.config.seed = static_cast<std::uint64_t>(seed);
        ctx.output_dir = output_dir;
        ctx.jobs = jobs;

        if (synth->parsed()) {
            synth_cfg.seed = ctx.config.seed;
            const auto r = cmd_synth(synth_cfg, ctx);
            std::printf("manifest: %s\nconfig:   %s\n", r.manifest_path.c_str(),
                        r.config_path.c_str());
            return 0;
        }
        if (extract->parsed()) {
            const auto r = cmd_extract(manifest_path, ctx, snr_table);
            for (const auto& d : r.diagnostics) std::fprintf(stderr, "%s\n", d.c_str());
            if (!r.index_path.empty())
                std::printf("extracted %zu recording(s); index: %s\n", r.n_ok,
                            r.index_path.c_str());
            return r.n_failed > 0 ? 2 : 0;
        }
        if (select->parsed()) {
            const auto r = cmd_select(index_path, ctx);
            std::printf("selected %zu features\nselection: %s\nreport:    %s\n",
                        r.outcome.final.features.size(), r.selection_path.c_str(),
                        r.report_path.c_str());
            return 0;
        }
        if (train->parsed()) {
            if (!mode_str.empty()) ctx.config.mode = train_mode_from_string(mode_str);
            if (!rep_str.empty())
                ctx.config.representation = representation_from_string(rep_str);
            const auto r = cmd_train(train_index, selection_path, ctx);
            for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            for (const auto& p : r.model_paths) std::printf("model: %s\n", p.c_str());
            return 0;
        }
        if (predict->parsed()) {
            const auto r = cmd_predict(model_path, features_path, ctx);
            std::printf("predicted %zu long-term frames\npredictions: %s\n", r.n_groups,
                        r.predictions_path.c_str());
            return 0;
        }
        if (evaluate->parsed()) {
            if (!eval_scheme.empty()) ctx.config.scheme = scheme_from_string(eval_scheme);
            if (!eval_mode.empty()) ctx.config.mode = train_mode_from_string(eval_mode);
            if (!eval_rep.empty())
                ctx.config.representation = representation_from_string(eval_rep);
            const auto r = cmd_evaluate(eval_index, eval_selection, ctx, compare_path);
            std::printf("%s", report_to_text(r.report).c_str());
            if (!r.mcnemar_summary.empty()) std::printf("%s", r.mcnemar_summary.c_str());
            std::printf("report: %s\n", r.report_text_path.c_str());
            return 0;
        }
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
