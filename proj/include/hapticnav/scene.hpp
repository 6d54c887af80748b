#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hapticnav/errors.hpp"
#include "hapticnav/perception.hpp"

namespace hapticnav {

struct ConsolidatedObject {
    std::string label;
    GridCell cell;
    std::optional<double> distance_m;  // median over the frames that observed a range
    int persistence_count = 0;
    double priority = 0.0;
    bool immediate_hazard = false;
};

struct SceneSummary {
    std::vector<ConsolidatedObject> objects;
    std::int64_t first_frame_id = 0;
    std::int64_t last_frame_id = 0;

    bool has_immediate_hazard() const {
        return std::any_of(objects.begin(), objects.end(),
                           [](const ConsolidatedObject& o) { return o.immediate_hazard; });
    }
};

struct SceneConfig {
    std::size_t window_capacity = 5;
    int persistence_k = 3;
    double hazard_distance_m = 1.0;

    void validate() const {
        if (window_capacity == 0) throw ConfigError("scene window capacity must be positive");
        if (persistence_k < 1 || static_cast<std::size_t>(persistence_k) > window_capacity) {
            throw ConfigError("persistence k must satisfy 1 <= k <= N");
        }
        if (!(hazard_distance_m > 0.0)) throw ConfigError("hazard distance must be positive");
    }
};

// Ring of the most recent mapped frames, ordered by frame_id.
class SceneWindow {
public:
    explicit SceneWindow(std::size_t capacity = 5) : capacity_(capacity) {
        if (capacity_ == 0) throw ConfigError("scene window capacity must be positive");
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return frames_.size(); }
    bool empty() const { return frames_.empty(); }
    const std::deque<MappedFrame>& frames() const { return frames_; }

    void push_frame(MappedFrame mapped) {
        if (!frames_.empty() && mapped.frame_id <= frames_.back().frame_id) {
            throw InputError("frame " + std::to_string(mapped.frame_id) +
                             " is not newer than window head " +
                             std::to_string(frames_.back().frame_id));
        }
        if (frames_.size() == capacity_) frames_.pop_front();
        frames_.push_back(std::move(mapped));
    }

    void clear() { frames_.clear(); }

private:
    std::size_t capacity_;
    std::deque<MappedFrame> frames_;
};

inline double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

inline SceneSummary flag_hazards(SceneSummary summary, double hazard_dist_m = 1.0) {
    for (auto& obj : summary.objects) {
        obj.immediate_hazard =
            obj.cell == kBottomCenter && obj.distance_m.has_value() && *obj.distance_m < hazard_dist_m;
    }
    return summary;
}

inline SceneSummary consolidate(const SceneWindow& window, int k, double hazard_dist_m = 1.0) {
    if (k < 1 || static_cast<std::size_t>(k) > window.capacity()) {
        throw ConfigError("persistence k must satisfy 1 <= k <= N");
    }
    SceneSummary summary;
    if (window.empty()) return summary;
    summary.first_frame_id = window.frames().front().frame_id;
    summary.last_frame_id = window.frames().back().frame_id;

    struct Track {
        int frames_seen = 0;
        std::vector<double> distances;
    };
    // (label, cell) identity; several instances in one frame count once, nearest range kept.
    std::map<std::pair<std::string, int>, Track> tracks;
    for (const auto& frame : window.frames()) {
        std::map<std::pair<std::string, int>, std::optional<double>> in_frame;
        for (const auto& obj : frame.objects) {
            auto key = std::make_pair(obj.label, obj.cell.index());
            auto [it, inserted] = in_frame.try_emplace(key, obj.distance_m);
            if (!inserted && obj.distance_m &&
                (!it->second || *obj.distance_m < *it->second)) {
                it->second = obj.distance_m;
            }
        }
        for (const auto& [key, dist] : in_frame) {
            Track& t = tracks[key];
            ++t.frames_seen;
            if (dist) t.distances.push_back(*dist);
        }
    }

    for (const auto& [key, track] : tracks) {
        if (track.frames_seen < k) continue;
        ConsolidatedObject obj;
        obj.label = key.first;
        obj.cell = GridCell{static_cast<GridRow>(key.second / 3), static_cast<GridColumn>(key.second % 3)};
        if (!track.distances.empty()) obj.distance_m = median(track.distances);
        obj.persistence_count = track.frames_seen;
        obj.priority = score_priority(obj.cell, obj.distance_m);
        summary.objects.push_back(std::move(obj));
    }
    std::sort(summary.objects.begin(), summary.objects.end(),
              [](const ConsolidatedObject& a, const ConsolidatedObject& b) {
                  if (a.priority != b.priority) return a.priority > b.priority;
                  const double da = a.distance_m.value_or(INFINITY);
                  const double db = b.distance_m.value_or(INFINITY);
                  if (da != db) return da < db;
                  if (a.label != b.label) return a.label < b.label;
                  return a.cell.index() < b.cell.index();
              });
    return flag_hazards(std::move(summary), hazard_dist_m);
}

}  // namespace hapticnav
