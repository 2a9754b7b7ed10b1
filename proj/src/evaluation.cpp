#include "coughband/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "coughband/common.hpp"

namespace coughband {

PartitionPlan block5_partition(const std::vector<std::vector<StreamObservation>>& streams,
                               int guard_gap) {
    constexpr int kBlocks = 5;
    PartitionPlan plan;
    plan.scheme = "block5";
    plan.folds.resize(kBlocks);

    std::size_t stream_id = 0;
    for (const auto& stream : streams) {
        ++stream_id;
        const std::size_t n = stream.size();
        if (n < kBlocks) {
            plan.warnings.push_back("stream " + std::to_string(stream_id - 1) + " has only "
                                    + std::to_string(n) + " observations; excluded from block5");
            continue;
        }

        // block sizes: remainder spread over the leading blocks
        std::array<std::size_t, kBlocks> sizes{};
        const std::size_t base = n / kBlocks, rem = n % kBlocks;
        std::array<std::size_t, kBlocks + 1> bounds{};
        for (int b = 0; b < kBlocks; ++b) {
            sizes[b] = base + (static_cast<std::size_t>(b) < rem ? 1 : 0);
            bounds[b + 1] = bounds[b] + sizes[b];
        }

        for (int fold = 0; fold < kBlocks; ++fold) {
            const std::size_t t_begin = bounds[fold], t_end = bounds[fold + 1];
            const long test_span_first = stream[t_begin].span_first;
            const long test_span_last = stream[t_end - 1].span_last;

            for (std::size_t k = 0; k < n; ++k) {
                if (k >= t_begin && k < t_end) {
                    plan.folds[fold].test.push_back(stream[k].index);
                    continue;
                }
                // drop train groups that touch the test span, plus the guard gap
                const bool overlaps = stream[k].span_last >= test_span_first
                                      && stream[k].span_first <= test_span_last;
                if (overlaps) continue;
                if (guard_gap > 0) {
                    const bool before = k < t_begin && k + static_cast<std::size_t>(guard_gap) >= t_begin;
                    const bool after = k >= t_end && k < t_end + static_cast<std::size_t>(guard_gap);
                    if (before || after) continue;
                }
                plan.folds[fold].train.push_back(stream[k].index);
            }
        }
    }
    return plan;
}

PartitionPlan lopo_partition(const std::vector<std::size_t>& patient_of_obs) {
    std::set<std::size_t> patients(patient_of_obs.begin(), patient_of_obs.end());
    if (patients.size() < 2)
        throw InputError("lopo_partition: at least 2 patients required, have "
                         + std::to_string(patients.size()));

    PartitionPlan plan;
    plan.scheme = "lopo";
    for (std::size_t p : patients) {
        Fold fold;
        for (std::size_t i = 0; i < patient_of_obs.size(); ++i)
            (patient_of_obs[i] == p ? fold.test : fold.train).push_back(i);
        plan.folds.push_back(std::move(fold));
    }
    return plan;
}

double ConfusionCounts::sensitivity() const {
    const auto d = tp + fn;
    return d ? 100.0 * static_cast<double>(tp) / static_cast<double>(d) : 0.0;
}

double ConfusionCounts::specificity() const {
    const auto d = tn + fp;
    return d ? 100.0 * static_cast<double>(tn) / static_cast<double>(d) : 0.0;
}

double ConfusionCounts::accuracy() const {
    const auto total = tp + fp + tn + fn;
    return total ? 100.0 * static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
}

ConfusionCounts confusion_metrics(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size())
        throw InputError("confusion_metrics: length mismatch (" + std::to_string(predictions.size())
                         + " predictions vs " + std::to_string(labels.size()) + " labels)");
    ConfusionCounts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1)
            (predictions[i] == 1 ? c.tp : c.fn)++;
        else
            (predictions[i] == 1 ? c.fp : c.tn)++;
    }
    return c;
}

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw InputError("roc_auc: length mismatch");
    std::size_t n_pos = 0, n_neg = 0;
    for (int y : labels) (y == 1 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw InputError("roc_auc: both classes required (pos " + std::to_string(n_pos) + ", neg "
                         + std::to_string(n_neg) + ")");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    RocResult out;
    out.points.emplace_back(0.0, 0.0);
    double auc = 0.0;
    std::size_t tp = 0, fp = 0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        // tied scores advance together so ties earn the trapezoid's half credit
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == 1 ? tp : fp)++;
            ++j;
        }
        i = j;
        const double tpr = static_cast<double>(tp) / static_cast<double>(n_pos);
        const double fpr = static_cast<double>(fp) / static_cast<double>(n_neg);
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        out.points.emplace_back(fpr, tpr);
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    out.auc = auc;
    return out;
}

McNemarResult mcnemar_test(std::span<const int> pred_a, std::span<const int> pred_b,
                           std::span<const int> labels) {
    if (pred_a.size() != labels.size() || pred_b.size() != labels.size())
        throw InputError("mcnemar_test: length mismatch");

    McNemarResult r;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool a_right = pred_a[i] == labels[i];
        const bool b_right = pred_b[i] == labels[i];
        if (a_right && !b_right) ++r.b;
        if (!a_right && b_right) ++r.c;
    }
    const double discordant = static_cast<double>(r.b + r.c);
    if (discordant == 0.0) {
        r.statistic = 0.0;
        r.p_value = 1.0;  // no evidence of difference
        return r;
    }
    const double diff = std::abs(static_cast<double>(r.b) - static_cast<double>(r.c));
    const double corrected = std::max(diff - 1.0, 0.0);
    r.statistic = corrected * corrected / discordant;
    // chi-square survival, 1 degree of freedom
    r.p_value = std::erfc(std::sqrt(r.statistic / 2.0));
    return r;
}

namespace {

double mean_power(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc / static_cast<double>(x.size());
}

}  // namespace

std::vector<EventSnr> snr_annotate(const AudioSignal& recording,
                                   const std::vector<AnnotationSpan>& spans) {
    const auto n = static_cast<long>(recording.samples.size());
    const double rate = recording.sample_rate;
    auto to_sample = [&](double s) {
        return std::clamp(static_cast<long>(std::llround(s * rate)), 0L, n);
    };

    // collect cough spans in time order and validate
    std::vector<std::pair<long, long>> coughs;
    for (const auto& sp : spans) {
        if (sp.label != "cough") continue;
        const long a = to_sample(sp.start_s), b = to_sample(sp.end_s);
        if (a >= b || b > n)
            throw InputError("snr_annotate: invalid cough span [" + std::to_string(sp.start_s)
                             + ", " + std::to_string(sp.end_s) + "] s");
        coughs.emplace_back(a, b);
    }
    std::sort(coughs.begin(), coughs.end());

    std::vector<EventSnr> out;
    for (std::size_t e = 0; e < coughs.size(); ++e) {
        const auto [a, b] = coughs[e];
        const long len = b - a;
        EventSnr ev;
        ev.event_index = e;
        ev.start_s = a / rate;
        ev.end_s = b / rate;

        const double p_cough =
            mean_power({recording.samples.data() + a, static_cast<std::size_t>(len)});

        // neighbouring non-cough windows of the event's own length, clipped at
        // the adjacent cough events and the recording edges
        long pre_end = a, pre_begin = a - len;
        if (e > 0) pre_begin = std::max(pre_begin, coughs[e - 1].second);
        long post_begin = b, post_end = b + len;
        if (e + 1 < coughs.size()) post_end = std::min(post_end, coughs[e + 1].first);
        pre_begin = std::max(pre_begin, 0L);
        post_end = std::min(post_end, n);

        double noise_acc = 0.0;
        int sides = 0;
        if (pre_end - pre_begin > 0) {
            noise_acc += mean_power({recording.samples.data() + pre_begin,
                                     static_cast<std::size_t>(pre_end - pre_begin)});
            ++sides;
        }
        if (post_end - post_begin > 0) {
            noise_acc += mean_power({recording.samples.data() + post_begin,
                                     static_cast<std::size_t>(post_end - post_begin)});
            ++sides;
        }
        if (sides == 0)
            throw InputError("snr_annotate: cough event " + std::to_string(e)
                             + " has no neighbouring non-cough samples");
        ev.one_sided = (sides == 1);
        const double p_noise = noise_acc / sides;

        if (p_cough <= p_noise || p_noise <= 0.0) {
            ev.negative_excess = true;
            ev.snr_db = -std::numeric_limits<double>::infinity();
        } else {
            ev.snr_db = 10.0 * std::log10((p_cough - p_noise) / p_noise);
        }
        out.push_back(ev);
    }
    return out;
}

}  // namespace coughband
