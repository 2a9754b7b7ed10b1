#include "coughband/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "coughband/annotations.hpp"
#include "coughband/common.hpp"

namespace coughband {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// two-pole resonator, peak near f0
struct Resonator {
    double b1, b2;
    double y1 = 0.0, y2 = 0.0;
    Resonator(double f0, double fs, double r = 0.97)
        : b1(2.0 * r * std::cos(2.0 * kPi * f0 / fs)), b2(-r * r) {}
    double step(double x) {
        const double y = x + b1 * y1 + b2 * y2;
        y2 = y1;
        y1 = y;
        return y;
    }
};

struct OnePoleLp {
    double a;
    double y = 0.0;
    explicit OnePoleLp(double a_) : a(a_) {}
    double step(double x) { return y = a * y + (1.0 - a) * x; }
};

void set_rms(std::vector<double>& x, double target) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    const double rms = std::sqrt(acc / std::max<std::size_t>(x.size(), 1));
    if (rms <= 0.0) return;
    const double g = target / rms;
    for (double& v : x) v *= g;
}

// explosive (25%) / intermediate (50%) / voiced (25%). Every phase keeps
// spectral content above 1 kHz plus the ~500 Hz resonance, so the burst
// signature differs from the low-passed babble background in all five bands.
std::vector<double> cough_burst(double fs, Rng& rng) {
    const double len_s = rng.uniform(0.25, 0.35);
    const auto n = static_cast<std::size_t>(len_s * fs);
    const std::size_t n1 = n / 4, n2 = n / 2;

    std::vector<double> burst(n, 0.0);
    Resonator res(rng.uniform(440.0, 560.0), fs, 0.965);
    Resonator res_hi(rng.uniform(1200.0, 1800.0), fs, 0.90);
    const double res_gain = 0.10;  // resonator output is large; normalize roughly

    // explosive: broadband turbulence with the 500 Hz peak, hard attack
    for (std::size_t i = 0; i < n1; ++i) {
        const double t = static_cast<double>(i) / n1;
        const double env = std::exp(-2.5 * t);
        const double noise = rng.normal();
        burst[i] = env * (0.9 * res.step(noise) * res_gain + 0.7 * noise
                          + 0.3 * res_hi.step(noise) * res_gain);
    }
    // intermediate: still turbulent, resonance dominant, slower decay
    for (std::size_t i = n1; i < n1 + n2; ++i) {
        const double t = static_cast<double>(i - n1) / n2;
        const double env = 0.6 * std::exp(-0.9 * t);
        const double noise = rng.normal();
        burst[i] = env * (1.1 * res.step(noise) * res_gain + 0.4 * noise
                          + 0.25 * res_hi.step(noise) * res_gain);
    }
    // voiced tail: harmonic stack with breathy turbulence on top
    const double f0 = rng.uniform(180.0, 250.0);
    const double phase0 = rng.uniform(0.0, 2.0 * kPi);
    for (std::size_t i = n1 + n2; i < n; ++i) {
        const double t = static_cast<double>(i - n1 - n2) / (n - n1 - n2);
        const double env = 0.5 * std::sin(kPi * std::min(1.0, t * 1.15));
        double v = 0.0;
        for (int h = 1; h <= 6; ++h)
            v += std::sin(2.0 * kPi * h * f0 * i / fs + phase0 * h) / h;
        const double noise = rng.normal();
        burst[i] = env * (0.6 * v + 0.15 * noise + 0.2 * res_hi.step(noise) * res_gain);
    }
    set_rms(burst, 1.0);
    return burst;
}

// non-cough foreground: a dull thump or a tonal beep
std::vector<double> other_event(double fs, Rng& rng) {
    if (rng.uniform() < 0.5) {
        const auto n = static_cast<std::size_t>(rng.uniform(0.10, 0.18) * fs);
        std::vector<double> ev(n);
        OnePoleLp lp(0.97);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / n;
            ev[i] = std::exp(-5.0 * t) * lp.step(rng.normal()) * 6.0;
        }
        set_rms(ev, 1.0);
        return ev;
    }
    const auto n = static_cast<std::size_t>(rng.uniform(0.15, 0.25) * fs);
    const double f = rng.uniform(700.0, 1800.0);
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / n;
        ev[i] = std::sin(kPi * t) * std::sin(2.0 * kPi * f * i / fs);
    }
    set_rms(ev, 1.0);
    return ev;
}

}  // namespace

SynthRecording synth_recording(const SynthConfig& cfg, double snr_db, std::uint64_t seed) {
    Rng rng(seed);
    const double fs = cfg.sample_rate;
    const auto n = static_cast<std::size_t>(cfg.duration_s * fs);

    SynthRecording rec;
    rec.audio.sample_rate = cfg.sample_rate;
    rec.audio.source_id = "synthetic";
    rec.audio.samples.assign(n, 0.0);
    auto& x = rec.audio.samples;

    // babble-like background: speech-band noise (two-pole low-pass) with slow
    // amplitude wander plus a faint broadband floor, levelled so the
    // fixed-loudness events land at the scenario SNR
    const double noise_rms = cfg.burst_rms / std::pow(10.0, snr_db / 20.0);
    {
        OnePoleLp lp1(0.92), lp2(0.92);
        const double am_f = rng.uniform(0.3, 1.2);
        const double am_phase = rng.uniform(0.0, 2.0 * kPi);
        for (std::size_t i = 0; i < n; ++i) {
            const double am = 1.0 + 0.4 * std::sin(2.0 * kPi * am_f * i / fs + am_phase);
            x[i] = am * lp2.step(lp1.step(rng.normal())) * 12.0 + 0.05 * rng.normal();
        }
        set_rms(x, noise_rms);
    }

    // one event per slot, jittered, so events never overlap
    const int n_events = cfg.coughs_per_recording + cfg.others_per_recording;
    const double margin = 1.0;
    const double slot = (cfg.duration_s - 2.0 * margin) / n_events;
    if (slot < 0.5)
        throw InputError("synth: recording too short for the requested event count");

    std::vector<int> kinds(n_events, 0);  // 1 = cough
    for (int i = 0; i < cfg.coughs_per_recording; ++i) kinds[i] = 1;
    rng.shuffle(kinds);

    for (int e = 0; e < n_events; ++e) {
        const bool is_cough = kinds[e] == 1;
        auto ev = is_cough ? cough_burst(fs, rng) : other_event(fs, rng);

        // nominal event loudness with natural per-event variation; events are
        // kept above an audibility floor relative to the background, since an
        // annotator would not mark events buried below it
        const double jitter = rng.uniform(-cfg.snr_jitter_db, cfg.snr_jitter_db);
        const double event_snr = std::max(snr_db + jitter, -3.0);
        set_rms(ev, noise_rms * std::pow(10.0, event_snr / 20.0));

        const double t0 = margin + e * slot + rng.uniform(0.0, std::max(0.0, slot - 0.45));
        const auto start = static_cast<std::size_t>(t0 * fs);
        if (start + ev.size() >= n) continue;
        for (std::size_t i = 0; i < ev.size(); ++i) x[start + i] += ev[i];
        rec.spans.push_back({t0, t0 + static_cast<double>(ev.size()) / fs,
                             is_cough ? "cough" : "other"});
    }

    // keep out of clipping range; uniform gain preserves every SNR
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    if (peak > 0.9) {
        const double g = 0.9 / peak;
        for (double& v : x) v *= g;
    }
    return rec;
}

std::string generate_corpus(const std::string& out_dir, const SynthConfig& cfg) {
    namespace fs = std::filesystem;
    if (cfg.scenario_snr_db.size() != 3)
        throw InputError("synth: scenario_snr_db must list 3 values (part1..part3)");
    fs::create_directories(out_dir);

    DatasetManifest manifest;
    std::uint64_t recording_seed = cfg.seed;
    for (int p = 0; p < cfg.n_patients; ++p) {
        char patient[16];
        std::snprintf(patient, sizeof(patient), "p%02d", p + 1);
        for (int s = 0; s < 3; ++s) {
            const std::string scenario = "part" + std::to_string(s + 1);
            const std::string stem = std::string(patient) + "_" + scenario;
            const auto rec = synth_recording(cfg, cfg.scenario_snr_db[s], ++recording_seed);

            write_wav((fs::path(out_dir) / (stem + ".wav")).string(), rec.audio);
            write_annotations((fs::path(out_dir) / (stem + ".tsv")).string(), rec.spans);
            // bare filenames: the loader resolves them against the manifest
            manifest.entries.push_back({stem + ".wav", stem + ".tsv", patient, scenario});
        }
    }
    const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
    save_manifest(manifest_path, manifest);
    return manifest_path;
}

}  // namespace coughband
