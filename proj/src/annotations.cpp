#include "coughband/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "coughband/common.hpp"

namespace coughband {

std::vector<AnnotationSpan> read_annotations(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open annotation file: " + path);

    std::vector<AnnotationSpan> spans;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        // normalize separators, strip comments
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        for (char& c : line)
            if (c == ',' || c == '\t' || c == '\r') c = ' ';
        std::istringstream ss(line);
        AnnotationSpan sp;
        if (!(ss >> sp.start_s)) continue;  // blank line
        if (!(ss >> sp.end_s >> sp.label))
            throw InputError(path + ":" + std::to_string(line_no)
                             + ": expected 'start_seconds end_seconds label'");
        if (sp.label != "cough" && sp.label != "other")
            throw InputError(path + ":" + std::to_string(line_no) + ": unknown label '" + sp.label
                             + "' (expected cough or other)");
        if (sp.end_s <= sp.start_s)
            throw InputError(path + ":" + std::to_string(line_no) + ": span ends before it starts");
        spans.push_back(sp);
    }
    std::sort(spans.begin(), spans.end(),
              [](const AnnotationSpan& a, const AnnotationSpan& b) { return a.start_s < b.start_s; });
    return spans;
}

void write_annotations(const std::string& path, const std::vector<AnnotationSpan>& spans) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot create annotation file: " + path);
    f << "# start_seconds\tend_seconds\tlabel\n";
    char buf[96];
    for (const auto& sp : spans) {
        std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t%s\n", sp.start_s, sp.end_s, sp.label.c_str());
        f << buf;
    }
    if (!f) throw InputError("write failed: " + path);
}

std::vector<int> label_frames(const std::vector<FrameIndex>& frames,
                              const std::vector<AnnotationSpan>& spans, int sample_rate,
                              std::size_t frame_len) {
    // cough spans as sample intervals, merged where overlapping
    std::vector<std::pair<long, long>> coughs;
    for (const auto& sp : spans) {
        if (sp.label != "cough") continue;
        coughs.emplace_back(static_cast<long>(std::llround(sp.start_s * sample_rate)),
                            static_cast<long>(std::llround(sp.end_s * sample_rate)));
    }
    std::sort(coughs.begin(), coughs.end());
    std::vector<std::pair<long, long>> merged;
    for (const auto& [a, b] : coughs) {
        if (!merged.empty() && a <= merged.back().second)
            merged.back().second = std::max(merged.back().second, b);
        else
            merged.emplace_back(a, b);
    }

    std::vector<int> labels(frames.size(), 0);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const long f_begin = static_cast<long>(frames[i].start_sample);
        const long f_end = f_begin + static_cast<long>(frame_len);
        long covered = 0;
        for (const auto& [a, b] : merged) {
            if (b <= f_begin) continue;
            if (a >= f_end) break;
            covered += std::min(b, f_end) - std::max(a, f_begin);
        }
        labels[i] = 2 * covered > static_cast<long>(frame_len) ? 1 : 0;
    }
    return labels;
}

}  // namespace coughband
