#pragma once

#include <istream>
#include <string>
#include <vector>

#include "hapticnav/errors.hpp"
#include "hapticnav/io/json.hpp"

namespace hapticnav::io {

struct LogIssue {
    std::size_t line = 0;  // 1-based
    std::string message;
};

struct DetectionLog {
    std::vector<DetectionFrame> frames;
    std::vector<LogIssue> issues;
};

// NDJSON, one DetectionFrame per line. Blank lines are ignored. Bad lines, and frames that break
// stream ordering, are reported with their line number and skipped; strict mode throws instead.
inline DetectionLog parse_detection_log(std::istream& in, bool strict = false) {
    DetectionLog log;
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            DetectionFrame f;
            try {
                f = json::parse(text).get<DetectionFrame>();
            } catch (const json::exception& e) {
                throw ParseError(e.what());
            } catch (const InputError& e) {
                throw ParseError(e.what());
            }
            if (f.image_width_px <= 0 || f.image_height_px <= 0) throw ParseError("image dimensions must be positive");
            if (!log.frames.empty()) {
                const auto& prev = log.frames.back();
                if (f.frame_id <= prev.frame_id) {
                    throw ParseError("frame_id " + std::to_string(f.frame_id) + " does not increase");
                }
                if (f.timestamp_ms < prev.timestamp_ms) throw ParseError("timestamp_ms decreases");
            }
            log.frames.push_back(std::move(f));
        } catch (const ParseError& e) {
            if (strict) throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
            log.issues.push_back({line_no, e.what()});
        }
    }
    return log;
}

inline DetectionLog load_detection_log(const std::string& path, bool strict = false) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open detection log '" + path + "'");
    return parse_detection_log(in, strict);
}

inline std::string to_ndjson(const std::vector<DetectionFrame>& frames) {
    std::string out;
    for (const auto& f : frames) out += json(f).dump() + "\n";
    return out;
}

}  // namespace hapticnav::io
