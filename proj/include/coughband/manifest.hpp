#pragma once

#include <string>
#include <vector>

namespace coughband {

// One recording: audio, optional annotations, patient and noise scenario.
struct ManifestEntry {
    std::string wav_path;
    std::string annotation_path;  // empty when unlabelled
    std::string patient_id;
    std::string scenario;         // part1 | part2 | part3
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
};

// JSON array of {wav, annotation, patient_id, scenario}. Referenced files
// must exist; scenario tags must be valid.
DatasetManifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const DatasetManifest& manifest);

bool valid_scenario(const std::string& s);

}  // namespace coughband
