#pragma once

#include <string>
#include <vector>

#include "coughband/evaluation.hpp"
#include "coughband/framing.hpp"

namespace coughband {

// Delimited text, one span per line: start_seconds, end_seconds, label
// (cough | other). Tabs, commas or spaces separate fields; '#' starts a
// comment line.
std::vector<AnnotationSpan> read_annotations(const std::string& path);
void write_annotations(const std::string& path, const std::vector<AnnotationSpan>& spans);

// Frame labels by the majority-of-samples rule: a frame is cough when more
// than half of its samples fall inside cough spans. Samples outside any span
// count as non-cough.
std::vector<int> label_frames(const std::vector<FrameIndex>& frames,
                              const std::vector<AnnotationSpan>& spans, int sample_rate,
                              std::size_t frame_len = 825);

}  // namespace coughband
