#include "coughband/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "coughband/common.hpp"

namespace coughband {

using nlohmann::json;

bool valid_scenario(const std::string& s) {
    return s == "part1" || s == "part2" || s == "part3";
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open manifest: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw InputError(path + ": manifest parse error: " + e.what());
    }
    if (!j.is_array()) throw InputError(path + ": manifest must be a JSON array");

    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    DatasetManifest m;
    for (const auto& je : j) {
        ManifestEntry e;
        try {
            e.wav_path = resolve(je.at("wav").get<std::string>());
            if (je.contains("annotation") && !je["annotation"].is_null()) {
                const auto a = je["annotation"].get<std::string>();
                if (!a.empty()) e.annotation_path = resolve(a);
            }
            e.patient_id = je.at("patient_id").get<std::string>();
            e.scenario = je.at("scenario").get<std::string>();
        } catch (const json::exception& ex) {
            throw InputError(path + ": manifest entry error: " + ex.what());
        }
        if (!valid_scenario(e.scenario))
            throw InputError(path + ": invalid scenario '" + e.scenario
                             + "' (expected part1, part2 or part3)");
        if (!std::filesystem::exists(e.wav_path))
            throw InputError(path + ": referenced WAV does not exist: " + e.wav_path);
        if (!e.annotation_path.empty() && !std::filesystem::exists(e.annotation_path))
            throw InputError(path + ": referenced annotation does not exist: " + e.annotation_path);
        m.entries.push_back(std::move(e));
    }
    return m;
}

void save_manifest(const std::string& path, const DatasetManifest& manifest) {
    json j = json::array();
    for (const auto& e : manifest.entries) {
        json je{{"wav", e.wav_path}, {"patient_id", e.patient_id}, {"scenario", e.scenario}};
        if (!e.annotation_path.empty()) je["annotation"] = e.annotation_path;
        j.push_back(je);
    }
    std::ofstream f(path);
    if (!f) throw InputError("cannot create manifest: " + path);
    f << j.dump(2) << "\n";
    if (!f) throw InputError("write failed: " + path);
}

}  // namespace coughband
