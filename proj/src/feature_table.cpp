#include "coughband/feature_table.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace coughband {

namespace {

constexpr char kMagic[8] = {'C', 'B', 'F', 'T', '1', 0, 0, 0};

template <typename T>
void put(std::vector<unsigned char>& out, const T& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(const unsigned char*& p, const unsigned char* end) {
    if (p + sizeof(T) > end) throw InputError("feature table truncated");
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
}

void put_string(std::vector<unsigned char>& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

std::string get_string(const unsigned char*& p, const unsigned char* end) {
    const auto n = get<std::uint32_t>(p, end);
    if (p + n > end) throw InputError("feature table truncated");
    std::string s(reinterpret_cast<const char*>(p), n);
    p += n;
    return s;
}

// write-temp-then-rename so readers never see a partial file
void atomic_write(const std::string& path, const std::vector<unsigned char>& bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw InputError("cannot create file: " + tmp);
        f.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
        if (!f) throw InputError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

void save_feature_table(const std::string& path, const FeatureTable& t) {
    if (t.features.rows != t.start_times.size()
        || (t.has_labels && t.labels.size() != t.features.rows))
        throw InputError("save_feature_table: inconsistent row counts");

    std::vector<unsigned char> out;
    out.insert(out.end(), kMagic, kMagic + 8);
    put<std::uint32_t>(out, 1);
    put_string(out, t.source_id);
    put_string(out, t.patient_id);
    put_string(out, t.scenario);
    put<std::uint8_t>(out, t.has_labels ? 1 : 0);
    put<std::uint64_t>(out, t.features.rows);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.features.cols));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.columns.size()));
    for (const auto& c : t.columns) put_string(out, c);
    for (double v : t.start_times) put(out, v);
    if (t.has_labels)
        for (int v : t.labels) put<std::uint8_t>(out, static_cast<std::uint8_t>(v));
    for (double v : t.features.data) put(out, v);
    put<std::uint64_t>(out, fnv1a64(out.data(), out.size()));
    atomic_write(path, out);
}

FeatureTable load_feature_table(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open feature table: " + path);
    std::vector<unsigned char> blob((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (blob.size() < 8 + sizeof(std::uint64_t))
        throw InputError(path + ": truncated feature table");
    const std::size_t payload = blob.size() - sizeof(std::uint64_t);
    std::uint64_t stored;
    std::memcpy(&stored, blob.data() + payload, sizeof(stored));
    if (stored != fnv1a64(blob.data(), payload))
        throw InputError(path + ": feature table checksum mismatch");

    const unsigned char* p = blob.data();
    const unsigned char* end = blob.data() + payload;
    if (std::memcmp(p, kMagic, 8) != 0)
        throw InputError(path + ": not a feature table (bad magic)");
    p += 8;
    const auto version = get<std::uint32_t>(p, end);
    if (version != 1)
        throw InputError(path + ": unsupported feature table version " + std::to_string(version));

    FeatureTable t;
    t.source_id = get_string(p, end);
    t.patient_id = get_string(p, end);
    t.scenario = get_string(p, end);
    t.has_labels = get<std::uint8_t>(p, end) != 0;
    const auto rows = get<std::uint64_t>(p, end);
    const auto cols = get<std::uint32_t>(p, end);
    const auto n_names = get<std::uint32_t>(p, end);
    t.columns.reserve(n_names);
    for (std::uint32_t i = 0; i < n_names; ++i) t.columns.push_back(get_string(p, end));
    t.start_times.resize(rows);
    for (auto& v : t.start_times) v = get<double>(p, end);
    if (t.has_labels) {
        t.labels.resize(rows);
        for (auto& v : t.labels) v = get<std::uint8_t>(p, end);
    }
    t.features = Matrix(rows, cols);
    for (auto& v : t.features.data) v = get<double>(p, end);
    return t;
}

void save_feature_table_tsv(const std::string& path, const FeatureTable& t) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot create file: " + path);
    f << "frame\tstart_time\tlabel";
    for (const auto& c : t.columns) f << '\t' << c;
    f << '\n';
    char buf[40];
    for (std::size_t i = 0; i < t.rows(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu\t%.6f\t%d", i, t.start_times[i],
                      t.has_labels ? t.labels[i] : -1);
        f << buf;
        for (std::size_t c = 0; c < t.features.cols; ++c) {
            std::snprintf(buf, sizeof(buf), "\t%.12g", t.features.at(i, c));
            f << buf;
        }
        f << '\n';
    }
    if (!f) throw InputError("write failed: " + path);
}

}  // namespace coughband
