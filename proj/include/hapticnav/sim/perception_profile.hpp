#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hapticnav/errors.hpp"
#include "hapticnav/haptics/patterns.hpp"
#include "hapticnav/sim/rng.hpp"

namespace hapticnav::sim {

using ConfusionMatrix = std::array<std::array<double, kPatternCount>, kPatternCount>;

// Pattern-recognition confusion matrix from the user study, rows = rendered pattern, columns =
// answered pattern, both in HapticPatternId order. Cells printed as "-" are 0. Rows are transcribed
// as printed and do not all sum to exactly 1; see normalized().
inline const ConfusionMatrix& table_one_raw() {
    // Columns: tap front/center/back/left/right, slide fast front/back/left/right,
    //          slide slow front/back/left/right.
    static const ConfusionMatrix m = {{
        {0.85, 0.11, 0.02, 0.03, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
        {0.06, 0.80, 0.05, 0.08, 0.02, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
        {0.00, 0.22, 0.71, 0.02, 0.05, 0.00, 0.02, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
        {0.08, 0.12, 0.05, 0.72, 0.03, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
        {0.03, 0.22, 0.09, 0.00, 0.65, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
        {0.00, 0.00, 0.00, 0.00, 0.00, 0.80, 0.00, 0.02, 0.09, 0.09, 0.00, 0.00, 0.00},
        {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.83, 0.03, 0.03, 0.00, 0.09, 0.00, 0.02},
        {0.00, 0.02, 0.00, 0.00, 0.00, 0.00, 0.00, 0.89, 0.02, 0.00, 0.00, 0.06, 0.02},
        {0.00, 0.00, 0.02, 0.00, 0.00, 0.00, 0.02, 0.00, 0.89, 0.00, 0.00, 0.00, 0.08},
        {0.00, 0.00, 0.02, 0.02, 0.00, 0.11, 0.00, 0.00, 0.00, 0.82, 0.05, 0.00, 0.00},
        {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.03, 0.00, 0.00, 0.00, 0.95, 0.00, 0.02},
        {0.00, 0.00, 0.00, 0.00, 0.00, 0.02, 0.02, 0.08, 0.02, 0.00, 0.02, 0.83, 0.03},
        {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.03, 0.08, 0.00, 0.02, 0.05, 0.83},
    }};
    return m;
}

inline ConfusionMatrix normalized(const ConfusionMatrix& raw) {
    ConfusionMatrix out = raw;
    for (std::size_t r = 0; r < kPatternCount; ++r) {
        double sum = 0.0;
        for (double v : raw[r]) {
            if (v < 0.0 || !std::isfinite(v)) throw ConfigError("confusion entries must be finite and >= 0");
            sum += v;
        }
        if (!(sum > 0.0)) throw ConfigError("confusion row " + std::string(to_string(kAllPatterns[r])) + " is empty");
        for (double& v : out[r]) v /= sum;
    }
    return out;
}

inline ConfusionMatrix identity_matrix() {
    ConfusionMatrix m{};
    for (std::size_t i = 0; i < kPatternCount; ++i) m[i][i] = 1.0;
    return m;
}

struct PerceptionProfile {
    std::string name = "perfect";
    ConfusionMatrix confusion = identity_matrix();
    double reaction_latency_ms = 500.0;

    static PerceptionProfile perfect(double latency_ms = 500.0) { return {"perfect", identity_matrix(), latency_ms}; }

    static PerceptionProfile table_one(double latency_ms = 500.0) {
        return {"table1", normalized(table_one_raw()), latency_ms};
    }

    void validate() const {
        for (std::size_t r = 0; r < kPatternCount; ++r) {
            double sum = 0.0;
            for (double v : confusion[r]) {
                if (v < 0.0) throw ConfigError("confusion entries must be >= 0");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-9) {
                throw ConfigError("confusion row " + std::string(to_string(kAllPatterns[r])) + " sums to " +
                                  std::to_string(sum));
            }
        }
        if (reaction_latency_ms < 0.0) throw ConfigError("reaction latency must be non-negative");
    }
};

inline HapticPatternId sample_perceived(HapticPatternId actual, const PerceptionProfile& profile, Rng& rng) {
    const auto& row = profile.confusion[index_of(actual)];
    return kAllPatterns[rng.categorical(row)];
}

// CSV with a header row and a leading name column, both listing pattern names; "-" or an empty
// cell reads as 0. Rows and columns may appear in any order but must cover all 13 patterns.
inline ConfusionMatrix parse_confusion_csv(std::istream& in) {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        return cells;
    };
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("confusion CSV is empty");
    const auto header = split(line);
    if (header.size() != kPatternCount + 1) throw ConfigError("confusion CSV header must have 14 cells");
    std::array<std::size_t, kPatternCount> col_index{};
    for (std::size_t c = 0; c < kPatternCount; ++c) col_index[c] = index_of(parse_pattern(header[c + 1]));

    ConfusionMatrix m{};
    std::array<bool, kPatternCount> seen{};
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (cells.size() != kPatternCount + 1) {
            throw ConfigError("confusion CSV line " + std::to_string(line_no) + ": expected 14 cells");
        }
        const std::size_t r = index_of(parse_pattern(cells[0]));
        if (seen[r]) throw ConfigError("confusion CSV repeats row " + cells[0]);
        seen[r] = true;
        for (std::size_t c = 0; c < kPatternCount; ++c) {
            const std::string& v = cells[c + 1];
            if (v.empty() || v == "-") continue;
            try {
                m[r][col_index[c]] = std::stod(v);
            } catch (const std::exception&) {
                throw ConfigError("confusion CSV line " + std::to_string(line_no) + ": bad number '" + v + "'");
            }
        }
    }
    for (std::size_t r = 0; r < kPatternCount; ++r) {
        if (!seen[r]) throw ConfigError("confusion CSV is missing row " + std::string(kPatternNames[r]));
    }
    return m;
}

inline ConfusionMatrix load_confusion_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open confusion matrix '" + path + "'");
    return parse_confusion_csv(in);
}

}  // namespace hapticnav::sim
