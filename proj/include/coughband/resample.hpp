#pragma once

#include "coughband/audio.hpp"

namespace coughband {

// Integer-factor decimation with a linear-phase FIR anti-alias low-pass
// (Kaiser-windowed sinc, cutoff at the new Nyquist). Edge samples are
// hold-extended so DC survives the filter exactly.
//
// Preconditions: non-empty signal, target_rate < sample_rate, and
// sample_rate an integer multiple of target_rate.
AudioSignal resample(const AudioSignal& signal, int target_rate);

}  // namespace coughband
