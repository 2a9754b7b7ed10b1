#pragma once

#include <vector>

#include "coughband/common.hpp"
#include "coughband/features.hpp"

namespace coughband {

struct ShortTermMatrix {
    Matrix features;                    // frames x 117
    std::vector<double> start_times;    // seconds
    std::vector<FrameIndex> frames;
};

// OpenMP-parallel extraction: pass one computes every frame's Welch PSD, pass
// two the feature vectors (flux reads the neighbour PSD, so both passes stay
// independent per frame). Results are bit-identical to the serial reference
// for any job count. jobs <= 0 uses the OpenMP default.
ShortTermMatrix extract_short_term(const AudioSignal& signal, const ShortTermExtractor& extractor,
                                   int jobs = 0);

// Plain single-loop reference implementation, kept for correctness testing
// and as the single-thread benchmark baseline.
ShortTermMatrix extract_short_term_serial(const AudioSignal& signal,
                                          const ShortTermExtractor& extractor);

}  // namespace coughband
