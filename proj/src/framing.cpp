#include "coughband/framing.hpp"

namespace coughband {

std::vector<FrameIndex> frame_signal(const AudioSignal& signal, const FrameSpec& spec) {
    std::vector<FrameIndex> frames;
    const std::size_t n = signal.samples.size();
    if (n < spec.frame_len) return frames;

    const std::size_t count = (n - spec.frame_len) / spec.hop + 1;
    frames.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t start = i * spec.hop;
        frames.push_back({i, start, static_cast<double>(start) / signal.sample_rate});
    }
    return frames;
}

std::vector<LongTermGroup> build_long_term(std::size_t n_frames) {
    std::vector<LongTermGroup> groups;
    if (n_frames < LongTermGroup::size) return groups;

    const std::size_t count = (n_frames - LongTermGroup::size) / LongTermGroup::stride + 1;
    groups.reserve(count);
    for (std::size_t g = 0; g < count; ++g)
        groups.push_back({g * LongTermGroup::stride});
    return groups;
}

}  // namespace coughband
