#include "coughband/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "coughband/framing.hpp"

namespace coughband {

Matrix GroupedDataset::group_frames(std::size_t g) const {
    const auto& grp = groups[g];
    const auto& frames = stream_frames[grp.stream];
    Matrix out(LongTermGroup::size, frames.cols);
    for (std::size_t i = 0; i < LongTermGroup::size; ++i)
        std::copy_n(frames.row(grp.first_frame + i), frames.cols, out.row(i));
    return out;
}

GroupedDataset build_grouped_dataset(const std::vector<FeatureTable>& tables,
                                     const std::vector<std::size_t>& keep_indices) {
    GroupedDataset data;
    if (tables.empty()) return data;

    data.has_labels = true;
    std::map<std::string, std::size_t> patient_ids;
    const std::map<std::string, std::size_t> scenario_ids{{"part1", 0}, {"part2", 1}, {"part3", 2}};

    for (const auto& t : tables) {
        if (!t.has_labels) data.has_labels = false;
        const auto sit = scenario_ids.find(t.scenario);
        if (sit == scenario_ids.end())
            throw InputError("feature table " + t.source_id + " has invalid scenario '"
                             + t.scenario + "'");

        auto [pit, inserted] = patient_ids.try_emplace(t.patient_id, data.patients.size());
        if (inserted) data.patients.push_back(t.patient_id);

        const std::size_t stream = data.stream_frames.size();
        std::vector<std::size_t> keep = keep_indices;
        if (keep.empty()) {
            keep.resize(t.features.cols);
            for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
        }
        Matrix reduced(t.rows(), keep.size());
        for (std::size_t r = 0; r < t.rows(); ++r)
            for (std::size_t c = 0; c < keep.size(); ++c) {
                if (keep[c] >= t.features.cols)
                    throw InputError("selected feature index " + std::to_string(keep[c])
                                     + " out of range for table with "
                                     + std::to_string(t.features.cols) + " columns");
                reduced.at(r, c) = t.features.at(r, keep[c]);
            }
        data.stream_frames.push_back(std::move(reduced));
        data.stream_labels.push_back(t.has_labels ? t.labels
                                                  : std::vector<int>(t.rows(), 0));
        data.stream_patient.push_back(pit->second);
        data.stream_scenario.push_back(sit->second);
        data.stream_source.push_back(t.source_id);

        for (const auto& g : build_long_term(t.rows())) {
            GroupedDataset::Group grp;
            grp.stream = stream;
            grp.first_frame = g.first_frame;
            std::array<int, LongTermGroup::size> labels{};
            for (std::size_t i = 0; i < LongTermGroup::size; ++i)
                labels[i] = data.stream_labels.back()[g.first_frame + i];
            grp.label = label_group(labels);
            grp.start_s = t.start_times[g.first_frame];
            grp.end_s = t.start_times[g.last_frame()] + 825.0 / 11025.0;
            data.groups.push_back(grp);
        }
    }
    if (!keep_indices.empty()) {
        data.selected_names.reserve(keep_indices.size());
        for (std::size_t i : keep_indices)
            data.selected_names.push_back(i < tables.front().columns.size()
                                              ? tables.front().columns[i]
                                              : "f" + std::to_string(i));
    } else {
        data.selected_names = tables.front().columns;
    }
    return data;
}

std::vector<double> PipelineModel::encode(const Matrix& group_frames) const {
    if (representation == Representation::avgsd) return avgsd(group_frames);
    if (!codebook) throw InputError("boaw model has no codebook");
    const auto hist = boaw_encode(group_frames, *codebook);
    std::vector<double> v(hist.size());
    for (std::size_t i = 0; i < hist.size(); ++i) v[i] = static_cast<double>(hist[i]);
    return v;
}

namespace {

// frames of the given groups, split by frame label, for codebook training
void collect_class_frames(const GroupedDataset& data, const std::vector<std::size_t>& group_ids,
                          Matrix& pos, Matrix& neg) {
    // deduplicate frames shared by adjacent groups
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<std::pair<std::size_t, std::size_t>> pos_rows, neg_rows;
    for (std::size_t g : group_ids) {
        const auto& grp = data.groups[g];
        for (std::size_t i = 0; i < LongTermGroup::size; ++i) {
            const auto key = std::make_pair(grp.stream, grp.first_frame + i);
            if (!seen.insert(key).second) continue;
            const int y = data.stream_labels[grp.stream][key.second];
            (y == 1 ? pos_rows : neg_rows).push_back(key);
        }
    }
    const std::size_t d = data.stream_frames.front().cols;
    pos = Matrix(pos_rows.size(), d);
    neg = Matrix(neg_rows.size(), d);
    for (std::size_t i = 0; i < pos_rows.size(); ++i)
        std::copy_n(data.stream_frames[pos_rows[i].first].row(pos_rows[i].second), d, pos.row(i));
    for (std::size_t i = 0; i < neg_rows.size(); ++i)
        std::copy_n(data.stream_frames[neg_rows[i].first].row(neg_rows[i].second), d, neg.row(i));
}

}  // namespace

PipelineModel train_pipeline_model(const GroupedDataset& data,
                                   const std::vector<std::size_t>& group_ids,
                                   const PipelineConfig& cfg, const std::string& part_tag) {
    if (group_ids.empty())
        throw InputError("train_pipeline_model: no training groups for " + part_tag);

    PipelineModel model;
    model.part_tag = part_tag;
    model.representation = cfg.representation;
    model.selected_names = data.selected_names;

    if (cfg.representation == Representation::boaw) {
        Matrix pos, neg;
        collect_class_frames(data, group_ids, pos, neg);
        if (pos.rows < cfg.k_pos || neg.rows < cfg.k_neg)
            throw InputError("boaw codebook: class frame counts (" + std::to_string(pos.rows) + " pos, "
                             + std::to_string(neg.rows) + " neg) below K");
        model.codebook = build_codebook(pos, neg, cfg.k_pos, cfg.k_neg, cfg.seed, cfg.kmeans);
    }

    Matrix X;
    std::vector<int> y(group_ids.size());
    for (std::size_t i = 0; i < group_ids.size(); ++i) {
        const auto vec = model.encode(data.group_frames(group_ids[i]));
        if (i == 0) X = Matrix(group_ids.size(), vec.size());
        std::copy(vec.begin(), vec.end(), X.row(i));
        y[i] = data.groups[group_ids[i]].label;
    }
    model.svm = svm_train(X, y, cfg.svm, cfg.kernel);
    return model;
}

// --- containers ---

namespace {

constexpr char kModelMagic[8] = {'C', 'B', 'P', 'M', '1', 0, 0, 0};
constexpr char kEnsembleMagic[8] = {'C', 'B', 'E', 'N', '1', 0, 0, 0};

template <typename T>
void put(std::vector<unsigned char>& out, const T& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(const unsigned char*& p, const unsigned char* end) {
    if (p + sizeof(T) > end) throw InputError("model container truncated");
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
}

void put_string(std::vector<unsigned char>& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

std::string get_string(const unsigned char*& p, const unsigned char* end) {
    const auto n = get<std::uint32_t>(p, end);
    if (p + n > end) throw InputError("model container truncated");
    std::string s(reinterpret_cast<const char*>(p), n);
    p += n;
    return s;
}

void write_pipeline_model_blob(std::vector<unsigned char>& out, const PipelineModel& m) {
    out.insert(out.end(), kModelMagic, kModelMagic + 8);
    put<std::uint32_t>(out, 1);
    put_string(out, m.part_tag);
    put<std::uint8_t>(out, m.representation == Representation::boaw ? 1 : 0);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.selected_names.size()));
    for (const auto& n : m.selected_names) put_string(out, n);
    put<std::uint8_t>(out, m.codebook.has_value() ? 1 : 0);
    if (m.codebook) write_codebook_blob(out, *m.codebook);
    write_svm_blob(out, m.svm);
}

PipelineModel read_pipeline_model_blob(const unsigned char*& p, const unsigned char* end) {
    if (p + 8 > end || std::memcmp(p, kModelMagic, 8) != 0)
        throw InputError("not a pipeline model container (bad magic)");
    p += 8;
    const auto version = get<std::uint32_t>(p, end);
    if (version != 1)
        throw InputError("unsupported pipeline model version " + std::to_string(version));

    PipelineModel m;
    m.part_tag = get_string(p, end);
    m.representation = get<std::uint8_t>(p, end) ? Representation::boaw : Representation::avgsd;
    const auto n_names = get<std::uint32_t>(p, end);
    m.selected_names.reserve(n_names);
    for (std::uint32_t i = 0; i < n_names; ++i) m.selected_names.push_back(get_string(p, end));
    if (get<std::uint8_t>(p, end)) m.codebook = read_codebook_blob(p, end);
    m.svm = read_svm_blob(p, end);
    return m;
}

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open file: " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_checksummed(const std::string& path, std::vector<unsigned char> blob) {
    put<std::uint64_t>(blob, fnv1a64(blob.data(), blob.size()));
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw InputError("cannot create file: " + tmp);
        f.write(reinterpret_cast<const char*>(blob.data()),
                static_cast<std::streamsize>(blob.size()));
        if (!f) throw InputError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::vector<unsigned char> read_checksummed(const std::string& path) {
    auto blob = read_file(path);
    if (blob.size() < sizeof(std::uint64_t)) throw InputError(path + ": truncated container");
    const std::size_t payload = blob.size() - sizeof(std::uint64_t);
    std::uint64_t stored;
    std::memcpy(&stored, blob.data() + payload, sizeof(stored));
    if (stored != fnv1a64(blob.data(), payload))
        throw InputError(path + ": container checksum mismatch");
    blob.resize(payload);
    return blob;
}

}  // namespace

void save_pipeline_model(const std::string& path, const PipelineModel& model) {
    std::vector<unsigned char> blob;
    write_pipeline_model_blob(blob, model);
    write_checksummed(path, std::move(blob));
}

PipelineModel load_pipeline_model(const std::string& path) {
    const auto blob = read_checksummed(path);
    const unsigned char* p = blob.data();
    return read_pipeline_model_blob(p, blob.data() + blob.size());
}

namespace {

void validate_ensemble(const PipelineEnsemble& ensemble, const std::string& context) {
    if (ensemble.members.size() != 3)
        throw InputError(context + ": ensemble requires exactly 3 members, have "
                         + std::to_string(ensemble.members.size()));
    for (const auto& m : ensemble.members) {
        if (m.representation != ensemble.members.front().representation)
            throw InputError(context + ": ensemble members mix representations");
        if (m.selected_names.size() != ensemble.members.front().selected_names.size())
            throw InputError(context + ": ensemble members disagree on feature dimension");
    }
}

}  // namespace

void save_pipeline_ensemble(const std::string& path, const PipelineEnsemble& ensemble) {
    validate_ensemble(ensemble, path);
    std::vector<unsigned char> blob;
    blob.insert(blob.end(), kEnsembleMagic, kEnsembleMagic + 8);
    put<std::uint32_t>(blob, 1);
    put<std::uint32_t>(blob, 3);
    for (const auto& m : ensemble.members) {
        std::vector<unsigned char> inner;
        write_pipeline_model_blob(inner, m);
        put<std::uint64_t>(blob, inner.size());
        blob.insert(blob.end(), inner.begin(), inner.end());
    }
    write_checksummed(path, std::move(blob));
}

PipelineEnsemble load_pipeline_ensemble(const std::string& path) {
    const auto blob = read_checksummed(path);
    const unsigned char* p = blob.data();
    const unsigned char* end = blob.data() + blob.size();
    if (p + 8 > end || std::memcmp(p, kEnsembleMagic, 8) != 0)
        throw InputError(path + ": not an ensemble container (bad magic)");
    p += 8;
    const auto version = get<std::uint32_t>(p, end);
    if (version != 1)
        throw InputError(path + ": unsupported ensemble version " + std::to_string(version));
    const auto count = get<std::uint32_t>(p, end);
    if (count != 3) throw InputError(path + ": ensemble must hold 3 members");

    PipelineEnsemble e;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto size = get<std::uint64_t>(p, end);
        if (p + size > end) throw InputError(path + ": ensemble member truncated");
        const unsigned char* q = p;
        e.members.push_back(read_pipeline_model_blob(q, p + size));
        p += size;
    }
    validate_ensemble(e, path);
    return e;
}

bool is_ensemble_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open file: " + path);
    char magic[8] = {0};
    f.read(magic, 8);
    return std::memcmp(magic, kEnsembleMagic, 8) == 0;
}

// --- cross-validated evaluation ---

namespace {

std::vector<std::vector<StreamObservation>> group_streams(const GroupedDataset& data) {
    std::vector<std::vector<StreamObservation>> streams(data.stream_frames.size());
    for (std::size_t g = 0; g < data.groups.size(); ++g) {
        const auto& grp = data.groups[g];
        streams[grp.stream].push_back(
            {g, static_cast<long>(grp.first_frame),
             static_cast<long>(grp.first_frame + LongTermGroup::size - 1)});
    }
    return streams;
}

std::vector<std::size_t> filter_by_scenario(const GroupedDataset& data,
                                            const std::vector<std::size_t>& ids,
                                            std::size_t scenario) {
    std::vector<std::size_t> out;
    for (std::size_t g : ids)
        if (data.scenario_of(g) == scenario) out.push_back(g);
    return out;
}

}  // namespace

ExperimentReport run_experiment(const GroupedDataset& data, const PipelineConfig& cfg) {
    if (!data.has_labels)
        throw InputError("run_experiment: dataset has no ground-truth labels");
    if (data.groups.empty()) throw InputError("run_experiment: no long-term observations");

    ExperimentReport report;
    report.scheme = to_string(cfg.scheme);
    report.mode = to_string(cfg.mode);
    report.representation = to_string(cfg.representation);

    PartitionPlan plan;
    if (cfg.scheme == PartitionScheme::block5) {
        plan = block5_partition(group_streams(data), cfg.guard_gap);
        report.warnings = plan.warnings;
    } else {
        std::vector<std::size_t> patient_of_obs(data.groups.size());
        for (std::size_t g = 0; g < data.groups.size(); ++g)
            patient_of_obs[g] = data.patient_of(g);
        plan = lopo_partition(patient_of_obs);
    }

    const std::size_t n = data.groups.size();
    report.tested.assign(n, 0);
    report.predictions.assign(n, 0);
    report.labels.assign(n, 0);
    report.scores.assign(n, 0.0);
    for (std::size_t g = 0; g < n; ++g) report.labels[g] = data.groups[g].label;

    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        const auto& fold = plan.folds[f];
        if (fold.test.empty()) continue;

        std::vector<PipelineModel> models;
        if (cfg.mode == TrainMode::single) {
            models.push_back(train_pipeline_model(data, fold.train, cfg, "all"));
        } else {
            for (std::size_t s = 0; s < 3; ++s) {
                const auto ids = filter_by_scenario(data, fold.train, s);
                if (ids.empty())
                    throw InputError("fold " + std::to_string(f) + ": no training data for part"
                                     + std::to_string(s + 1));
                models.push_back(
                    train_pipeline_model(data, ids, cfg, "part" + std::to_string(s + 1)));
            }
        }

        for (std::size_t g : fold.test) {
            const auto frames = data.group_frames(g);
            double score = 0.0;
            int label = 0;
            if (cfg.mode == TrainMode::single) {
                score = models[0].score(frames);
                label = score > 0.0 ? 1 : 0;
            } else if (cfg.mode == TrainMode::per_part) {
                score = models[data.scenario_of(g)].score(frames);
                label = score > 0.0 ? 1 : 0;
            } else {
                std::array<int, 3> votes{};
                for (std::size_t m = 0; m < 3; ++m) {
                    const double s = models[m].score(frames);
                    votes[m] = s > 0.0 ? 1 : 0;
                    score += s / 3.0;  // mean decision value as the ROC score
                }
                label = ensemble_vote(votes);
            }
            report.tested[g] = 1;
            report.predictions[g] = label;
            report.scores[g] = score;
        }

        FoldMetrics fm;
        fm.fold = f;
        std::vector<int> fold_pred, fold_lab;
        std::vector<double> fold_scores;
        for (std::size_t g : fold.test) {
            fold_pred.push_back(report.predictions[g]);
            fold_lab.push_back(report.labels[g]);
            fold_scores.push_back(report.scores[g]);
        }
        fm.confusion = confusion_metrics(fold_pred, fold_lab);
        const bool both = fm.confusion.tp + fm.confusion.fn > 0 && fm.confusion.tn + fm.confusion.fp > 0;
        if (both) {
            fm.auc = roc_auc(fold_scores, fold_lab).auc;
            fm.auc_valid = true;
        }
        report.folds.push_back(fm);
    }

    // pooled metrics over every tested observation
    std::vector<int> pred, lab;
    std::vector<double> scores;
    std::array<std::vector<int>, 3> sc_pred, sc_lab;
    for (std::size_t g = 0; g < n; ++g) {
        if (!report.tested[g]) continue;
        pred.push_back(report.predictions[g]);
        lab.push_back(report.labels[g]);
        scores.push_back(report.scores[g]);
        sc_pred[data.scenario_of(g)].push_back(report.predictions[g]);
        sc_lab[data.scenario_of(g)].push_back(report.labels[g]);
    }
    if (pred.empty()) throw InputError("run_experiment: no observations were tested");
    report.pooled = confusion_metrics(pred, lab);
    report.roc = roc_auc(scores, lab);
    report.auc_pooled = report.roc.auc;

    double auc_sum = 0.0;
    std::size_t auc_count = 0;
    for (const auto& fm : report.folds)
        if (fm.auc_valid) {
            auc_sum += fm.auc;
            ++auc_count;
        }
    report.auc_fold_average = auc_count ? auc_sum / static_cast<double>(auc_count) : report.auc_pooled;

    for (std::size_t s = 0; s < 3; ++s)
        if (!sc_lab[s].empty())
            report.per_scenario["part" + std::to_string(s + 1)] =
                confusion_metrics(sc_pred[s], sc_lab[s]);
    return report;
}

std::string report_to_text(const ExperimentReport& r) {
    std::string out;
    char buf[256];
    auto line = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof(buf), fmt, args...);
        out += buf;
        out += '\n';
    };
    line("scheme: %s   mode: %s   representation: %s", r.scheme.c_str(), r.mode.c_str(),
         r.representation.c_str());
    line("pooled: SEN %.2f%%  SPE %.2f%%  ACC %.2f%%  AUC(fold-avg) %.4f  AUC(pooled) %.4f",
         r.pooled.sensitivity(), r.pooled.specificity(), r.pooled.accuracy(), r.auc_fold_average,
         r.auc_pooled);
    line("confusion: TP %zu  FP %zu  TN %zu  FN %zu", r.pooled.tp, r.pooled.fp, r.pooled.tn,
         r.pooled.fn);
    for (const auto& [scenario, c] : r.per_scenario)
        line("%s: SEN %.2f%%  SPE %.2f%%  ACC %.2f%%  (TP %zu FP %zu TN %zu FN %zu)",
             scenario.c_str(), c.sensitivity(), c.specificity(), c.accuracy(), c.tp, c.fp, c.tn,
             c.fn);
    for (const auto& f : r.folds) {
        if (f.auc_valid)
            line("fold %zu: SEN %.2f%%  SPE %.2f%%  ACC %.2f%%  AUC %.4f", f.fold,
                 f.confusion.sensitivity(), f.confusion.specificity(), f.confusion.accuracy(),
                 f.auc);
        else
            line("fold %zu: SEN %.2f%%  SPE %.2f%%  ACC %.2f%%  AUC n/a (single-class fold)",
                 f.fold, f.confusion.sensitivity(), f.confusion.specificity(),
                 f.confusion.accuracy());
    }
    for (const auto& w : r.warnings) out += "warning: " + w + "\n";
    return out;
}

std::string report_to_json(const ExperimentReport& r) {
    nlohmann::json j;
    j["scheme"] = r.scheme;
    j["mode"] = r.mode;
    j["representation"] = r.representation;
    auto conf = [](const ConfusionCounts& c) {
        return nlohmann::json{{"tp", c.tp},        {"fp", c.fp},
                              {"tn", c.tn},        {"fn", c.fn},
                              {"sen", c.sensitivity()}, {"spe", c.specificity()},
                              {"acc", c.accuracy()}};
    };
    j["pooled"] = conf(r.pooled);
    j["auc_pooled"] = r.auc_pooled;
    j["auc_fold_average"] = r.auc_fold_average;
    j["folds"] = nlohmann::json::array();
    for (const auto& f : r.folds) {
        nlohmann::json jf = conf(f.confusion);
        jf["fold"] = f.fold;
        if (f.auc_valid) jf["auc"] = f.auc;
        j["folds"].push_back(jf);
    }
    for (const auto& [scenario, c] : r.per_scenario) j["per_scenario"][scenario] = conf(c);
    j["warnings"] = r.warnings;
    j["roc_points"] = nlohmann::json::array();
    for (const auto& [fpr, tpr] : r.roc.points) j["roc_points"].push_back({fpr, tpr});
    return j.dump(2) + "\n";
}

}  // namespace coughband
