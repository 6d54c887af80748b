#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hapticnav/errors.hpp"

namespace hapticnav {

// Normalized image rectangle, origin at top-left, all coordinates in [0,1].
struct BBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double height() const { return y_max - y_min; }
    double center_x() const { return (x_min + x_max) / 2.0; }
    double center_y() const { return (y_min + y_max) / 2.0; }

    bool operator==(const BBox&) const = default;
};

struct Detection {
    std::string label;
    BBox bbox;
    double confidence = 1.0;
    // Ground-truth range attached by the synthetic camera; never present in real logs.
    std::optional<double> distance_hint_m;

    bool operator==(const Detection&) const = default;
};

struct DetectionFrame {
    std::int64_t frame_id = 0;
    std::int64_t timestamp_ms = 0;
    int image_width_px = 640;
    int image_height_px = 480;
    std::vector<Detection> detections;
};

enum class GridRow { Top, Bottom };
enum class GridColumn { Left, Center, Right };

struct GridCell {
    GridRow row = GridRow::Top;
    GridColumn column = GridColumn::Left;

    // 0..5, row-major; used for deterministic ordering.
    int index() const { return static_cast<int>(row) * 3 + static_cast<int>(column); }

    auto operator<=>(const GridCell&) const = default;
};

inline constexpr GridCell kBottomCenter{GridRow::Bottom, GridColumn::Center};

inline std::string_view to_string(GridRow row) { return row == GridRow::Top ? "top" : "bottom"; }

inline std::string_view to_string(GridColumn col) {
    switch (col) {
        case GridColumn::Left: return "left";
        case GridColumn::Center: return "center";
        case GridColumn::Right: return "right";
    }
    return "?";
}

inline std::string to_string(GridCell cell) {
    return std::string(to_string(cell.row)) + "-" + std::string(to_string(cell.column));
}

inline GridCell parse_cell(std::string_view text) {
    for (GridRow r : {GridRow::Top, GridRow::Bottom}) {
        for (GridColumn c : {GridColumn::Left, GridColumn::Center, GridColumn::Right}) {
            if (to_string(GridCell{r, c}) == text) return GridCell{r, c};
        }
    }
    throw InputError("unknown grid cell '" + std::string(text) + "'");
}

struct SpatialObject {
    std::string label;
    GridCell cell;
    std::optional<double> distance_m;
    double priority = 0.0;
    BBox bbox;
    double confidence = 0.0;
};

struct CameraModel {
    double focal_length_px = 500.0;
    std::map<std::string, double> class_height_priors_m;

    void validate() const {
        if (!(focal_length_px > 0.0)) throw ConfigError("camera focal_length_px must be positive");
        for (const auto& [label, h] : class_height_priors_m) {
            if (!(h > 0.0)) throw ConfigError("height prior for '" + label + "' must be positive");
        }
    }

    static CameraModel defaults() {
        return CameraModel{500.0,
                           {{"person", 1.7},
                            {"chair", 0.9},
                            {"table", 0.75},
                            {"box", 0.5},
                            {"door", 2.0},
                            {"trash can", 0.8},
                            {"bicycle", 1.0}}};
    }
};

struct PerceptionConfig {
    double min_confidence = 0.25;
    // Prefer a detection's ground-truth range over the pinhole estimate (simulation only).
    bool use_distance_hint = true;
};

inline void validate_bbox(const BBox& b) {
    auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (!in_unit(b.x_min) || !in_unit(b.y_min) || !in_unit(b.x_max) || !in_unit(b.y_max)) {
        throw InputError("bbox coordinates must lie in [0,1]");
    }
    if (!(b.x_min < b.x_max) || !(b.y_min < b.y_max)) {
        throw InputError("bbox must satisfy x_min < x_max and y_min < y_max");
    }
}

inline void validate_detection(const Detection& d) {
    validate_bbox(d.bbox);
    if (!std::isfinite(d.confidence) || d.confidence < 0.0 || d.confidence > 1.0) {
        throw InputError("confidence must lie in [0,1]");
    }
}

// Half-open intervals; the centroid on a boundary belongs to the lower/central-right cell.
inline GridCell assign_cell(const BBox& bbox) {
    validate_bbox(bbox);
    const double cx = bbox.center_x();
    const double cy = bbox.center_y();
    GridColumn col = GridColumn::Right;
    if (cx < 1.0 / 3.0) {
        col = GridColumn::Left;
    } else if (cx < 2.0 / 3.0) {
        col = GridColumn::Center;
    }
    const GridRow row = cy < 0.5 ? GridRow::Top : GridRow::Bottom;
    return GridCell{row, col};
}

// Pinhole range from a class height prior. Absent when the label has no prior.
inline std::optional<double> estimate_distance(const Detection& det, const DetectionFrame& frame,
                                               const CameraModel& cam) {
    if (frame.image_width_px <= 0 || frame.image_height_px <= 0) {
        throw InputError("frame dimensions must be positive");
    }
    const double height_px = det.bbox.height() * frame.image_height_px;
    if (!(height_px > 0.0)) throw InputError("zero-height bbox for '" + det.label + "'");
    auto it = cam.class_height_priors_m.find(det.label);
    if (it == cam.class_height_priors_m.end()) return std::nullopt;
    return cam.focal_length_px * it->second / height_px;
}

inline double score_priority(GridCell cell, std::optional<double> distance_m) {
    const double row_w = cell.row == GridRow::Bottom ? 2.0 : 1.0;
    const double col_w = cell.column == GridColumn::Center ? 1.5 : 1.0;
    double dist_w = 0.0;
    if (distance_m) {
        if (!(*distance_m > 0.0)) throw InputError("distance must be positive");
        dist_w = std::min(2.0, 1.0 / *distance_m);
    }
    return row_w + col_w + dist_w;
}

// Priority descending, then nearer first (unknown range last), then label, then cell.
inline bool priority_before(const SpatialObject& a, const SpatialObject& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    const double da = a.distance_m.value_or(INFINITY);
    const double db = b.distance_m.value_or(INFINITY);
    if (da != db) return da < db;
    if (a.label != b.label) return a.label < b.label;
    if (a.cell != b.cell) return a.cell.index() < b.cell.index();
    return a.confidence > b.confidence;
}

struct MappedFrame {
    std::int64_t frame_id = 0;
    std::int64_t timestamp_ms = 0;
    std::vector<SpatialObject> objects;
    std::vector<std::string> diagnostics;
};

inline MappedFrame map_frame(const DetectionFrame& frame, const CameraModel& cam,
                             const PerceptionConfig& cfg = {}) {
    if (frame.image_width_px <= 0 || frame.image_height_px <= 0) {
        throw InputError("frame " + std::to_string(frame.frame_id) + ": dimensions must be positive");
    }
    MappedFrame out{frame.frame_id, frame.timestamp_ms, {}, {}};
    out.objects.reserve(frame.detections.size());
    for (std::size_t i = 0; i < frame.detections.size(); ++i) {
        const Detection& det = frame.detections[i];
        try {
            validate_detection(det);
            if (det.confidence < cfg.min_confidence) continue;
            SpatialObject obj;
            obj.label = det.label;
            obj.bbox = det.bbox;
            obj.confidence = det.confidence;
            obj.cell = assign_cell(det.bbox);
            if (cfg.use_distance_hint && det.distance_hint_m && *det.distance_hint_m > 0.0) {
                obj.distance_m = det.distance_hint_m;
            } else {
                obj.distance_m = estimate_distance(det, frame, cam);
            }
            obj.priority = score_priority(obj.cell, obj.distance_m);
            out.objects.push_back(std::move(obj));
        } catch (const InputError& e) {
            out.diagnostics.push_back("frame " + std::to_string(frame.frame_id) + " detection " +
                                      std::to_string(i) + ": " + e.what());
        }
    }
    std::stable_sort(out.objects.begin(), out.objects.end(), priority_before);
    return out;
}

}  // namespace hapticnav
