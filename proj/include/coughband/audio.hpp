#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coughband {

// Mono audio, samples normalized to [-1, 1].
struct AudioSignal {
    std::vector<double> samples;
    int sample_rate = 0;
    std::string source_id;

    double duration_s() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

// Reads a PCM 16-bit WAV file. Mono or stereo (stereo is averaged to mono).
// Only 44100 Hz and 11025 Hz are accepted; anything else is rejected with a
// diagnostic naming the offending format field.
AudioSignal read_wav(const std::string& path);

// Writes mono PCM 16-bit; samples are clipped to [-1, 1].
void write_wav(const std::string& path, const AudioSignal& signal);

// read_wav followed by resampling to 11025 Hz when needed.
AudioSignal ingest_audio(const std::string& path);

constexpr int kPipelineRate = 11025;

}  // namespace coughband
