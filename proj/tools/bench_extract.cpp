// Benchmark: serial reference vs OpenMP short-term feature extraction.
// Reports the real-time factor of each path and the parallel speedup.

#include <chrono>
#include <cstdio>
#include <string>

#include "coughband/pipeline.hpp"
#include "coughband/synth.hpp"

using namespace coughband;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    double duration_s = 60.0;
    int jobs = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--duration" && i + 1 < argc) duration_s = std::stod(argv[++i]);
        else if (arg == "--jobs" && i + 1 < argc) jobs = std::stoi(argv[++i]);
        else {
            std::fprintf(stderr, "usage: bench_extract [--duration SECONDS] [--jobs N]\n");
            return 1;
        }
    }

    SynthConfig cfg;
    cfg.sample_rate = 11025;
    cfg.duration_s = duration_s;
    cfg.coughs_per_recording = static_cast<int>(duration_s / 4.0);
    cfg.others_per_recording = static_cast<int>(duration_s / 8.0);
    const auto rec = synth_recording(cfg, 15.0, 7);
    std::printf("signal: %.1f s at %d Hz\n", rec.audio.duration_s(), rec.audio.sample_rate);

    const ShortTermExtractor extractor;

    // warm-up (plan construction, page faults)
    extract_short_term_serial(rec.audio, extractor);

    auto t0 = clock_type::now();
    const auto serial = extract_short_term_serial(rec.audio, extractor);
    const double serial_s = seconds_since(t0);

    t0 = clock_type::now();
    const auto parallel = extract_short_term(rec.audio, extractor, jobs);
    const double parallel_s = seconds_since(t0);

    // identical output is part of the contract
    bool identical = serial.features.data == parallel.features.data;

    std::printf("frames: %zu (117 features each)\n", serial.features.rows);
    std::printf("serial:   %.3f s  (%.1fx real time)\n", serial_s, duration_s / serial_s);
    std::printf("parallel: %.3f s  (%.1fx real time, speedup %.2fx)\n", parallel_s,
                duration_s / parallel_s, serial_s / parallel_s);
    std::printf("outputs bit-identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
