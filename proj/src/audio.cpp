#include "coughband/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "coughband/common.hpp"
#include "coughband/resample.hpp"

namespace coughband {

namespace {

std::uint32_t read_u32(std::istream& s) {
    unsigned char b[4];
    s.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (b[1] << 8) | (b[2] << 16)
           | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& s) {
    unsigned char b[2];
    s.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& s, std::uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                 static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    s.write(b, 4);
}

void write_u16(std::ostream& s, std::uint16_t v) {
    char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    s.write(b, 2);
}

}  // namespace

AudioSignal read_wav(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open WAV file: " + path);

    char tag[5] = {0};
    f.read(tag, 4);
    if (std::strncmp(tag, "RIFF", 4) != 0)
        throw InputError(path + ": not a RIFF file");
    read_u32(f);  // riff size
    f.read(tag, 4);
    if (std::strncmp(tag, "WAVE", 4) != 0)
        throw InputError(path + ": RIFF form is not WAVE");

    std::uint16_t audio_format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    std::vector<std::int16_t> raw;
    bool have_fmt = false, have_data = false;

    while (f && !(have_fmt && have_data)) {
        f.read(tag, 4);
        if (!f) break;
        std::uint32_t chunk_size = read_u32(f);
        if (std::strncmp(tag, "fmt ", 4) == 0) {
            audio_format = read_u16(f);
            channels = read_u16(f);
            rate = read_u32(f);
            read_u32(f);  // byte rate
            read_u16(f);  // block align
            bits = read_u16(f);
            if (chunk_size > 16) f.seekg(chunk_size - 16, std::ios::cur);
            have_fmt = true;

            if (audio_format != 1)
                throw InputError(path + ": unsupported audio_format " + std::to_string(audio_format)
                                 + " (only PCM format 1 is supported)");
            if (channels != 1 && channels != 2)
                throw InputError(path + ": unsupported channel count " + std::to_string(channels)
                                 + " (mono or stereo required)");
            if (bits != 16)
                throw InputError(path + ": unsupported bits_per_sample " + std::to_string(bits)
                                 + " (16-bit PCM required)");
            if (rate != 44100 && rate != 11025)
                throw InputError(path + ": unsupported sample_rate " + std::to_string(rate)
                                 + " (expected 44100 or 11025)");
        } else if (std::strncmp(tag, "data", 4) == 0) {
            if (!have_fmt) throw InputError(path + ": data chunk precedes fmt chunk");
            raw.resize(chunk_size / 2);
            f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 2));
            have_data = true;
        } else {
            // skip unknown chunk (padded to even size)
            f.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
        }
    }
    if (!have_fmt || !have_data)
        throw InputError(path + ": missing fmt or data chunk");

    AudioSignal out;
    out.sample_rate = static_cast<int>(rate);
    out.source_id = path;
    if (channels == 1) {
        out.samples.resize(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i)
            out.samples[i] = raw[i] / 32768.0;
    } else {
        out.samples.resize(raw.size() / 2);
        for (std::size_t i = 0; i < out.samples.size(); ++i)
            out.samples[i] = (raw[2 * i] + raw[2 * i + 1]) / (2.0 * 32768.0);
    }
    return out;
}

void write_wav(const std::string& path, const AudioSignal& signal) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot create WAV file: " + path);

    const std::uint32_t n = static_cast<std::uint32_t>(signal.samples.size());
    const std::uint32_t data_bytes = n * 2;
    f.write("RIFF", 4);
    write_u32(f, 36 + data_bytes);
    f.write("WAVE", 4);
    f.write("fmt ", 4);
    write_u32(f, 16);
    write_u16(f, 1);  // PCM
    write_u16(f, 1);  // mono
    write_u32(f, static_cast<std::uint32_t>(signal.sample_rate));
    write_u32(f, static_cast<std::uint32_t>(signal.sample_rate * 2));
    write_u16(f, 2);
    write_u16(f, 16);
    f.write("data", 4);
    write_u32(f, data_bytes);
    for (double s : signal.samples) {
        double c = std::clamp(s, -1.0, 1.0);
        auto v = static_cast<std::int16_t>(std::lrint(c * 32767.0));
        char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
        f.write(b, 2);
    }
    if (!f) throw InputError("write failed: " + path);
}

AudioSignal ingest_audio(const std::string& path) {
    AudioSignal s = read_wav(path);
    if (s.sample_rate != kPipelineRate) s = resample(s, kPipelineRate);
    return s;
}

}  // namespace coughband
