#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "coughband/audio.hpp"

namespace coughband {

// 75 ms analysis frame at 11025 Hz, fixed at 825 samples (3 x 275 so the
// Welch sub-frames divide exactly). Hop is 56 ms = 617 samples.
struct FrameSpec {
    std::size_t frame_len = 825;
    std::size_t hop = 617;
};

struct FrameIndex {
    std::size_t index;
    std::size_t start_sample;
    double start_time;
};

// Hop-strided frames; a trailing partial frame is discarded. A signal shorter
// than one frame yields an empty sequence.
std::vector<FrameIndex> frame_signal(const AudioSignal& signal, const FrameSpec& spec = {});

inline std::span<const double> frame_samples(const AudioSignal& signal, const FrameIndex& f,
                                             const FrameSpec& spec = {}) {
    return {signal.samples.data() + f.start_sample, spec.frame_len};
}

// Long-term groups: 5 consecutive short-term frames advancing by 4, so
// consecutive groups share exactly one frame (~299 ms effective span).
struct LongTermGroup {
    std::size_t first_frame;  // frames [first_frame, first_frame + size)
    static constexpr std::size_t size = 5;
    static constexpr std::size_t stride = 4;

    std::size_t last_frame() const { return first_frame + size - 1; }
};

std::vector<LongTermGroup> build_long_term(std::size_t n_frames);

}  // namespace coughband
