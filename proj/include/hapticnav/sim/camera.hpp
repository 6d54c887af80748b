#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "hapticnav/geometry.hpp"
#include "hapticnav/navigator.hpp"
#include "hapticnav/perception.hpp"
#include "hapticnav/sim/environment.hpp"

namespace hapticnav::sim {

struct CameraRig {
    double fov_deg = 60.0;
    double range_m = 5.0;
    int image_width_px = 640;
    int image_height_px = 480;
    double camera_height_m = 1.6;
    double default_object_height_m = 1.0;
    double confidence = 0.9;
};

namespace detail {

// True when [lo, hi] is covered by the union of the given intervals.
inline bool covered(double lo, double hi, std::vector<std::pair<double, double>> spans) {
    std::sort(spans.begin(), spans.end());
    double reach = lo;
    for (const auto& [a, b] : spans) {
        if (a > reach) break;
        reach = std::max(reach, b);
        if (reach >= hi) return true;
    }
    return reach >= hi;
}

}  // namespace detail

// Synthetic detector. Each obstacle is a cylinder standing on the floor; the camera looks
// level along the heading. Horizontal placement is a pinhole projection of the obstacle's
// angular extent. Vertically the box bottom sits at the floor contact row and its height is the
// pinhole height f * h / d, both capped at the image edge, so the box never shrinks as the
// obstacle approaches. The surface range is attached as distance_hint_m. When given, sources
// receives the obstacles_at index behind each emitted detection.
inline DetectionFrame synth_camera(const Environment& env, const Pose& pose, const CameraModel& cam,
                                   const CameraRig& rig, double t_s, std::int64_t frame_id,
                                   std::vector<std::size_t>* sources = nullptr) {
    DetectionFrame frame;
    frame.frame_id = frame_id;
    frame.timestamp_ms = static_cast<std::int64_t>(std::llround(t_s * 1000.0));
    frame.image_width_px = rig.image_width_px;
    frame.image_height_px = rig.image_height_px;

    struct Candidate {
        double range_m;
        double lo_deg;
        double hi_deg;
        Detection det;
        std::size_t source;
    };
    std::vector<Candidate> candidates;
    const double half_fov = rig.fov_deg / 2.0;
    const double f = cam.focal_length_px;
    const double W = rig.image_width_px;
    const double H = rig.image_height_px;
    auto image_x = [&](double angle_deg) {
        const double a = std::clamp(angle_deg, -89.0, 89.0);
        return 0.5 - f * std::tan(deg_to_rad(a)) / W;
    };

    const auto circles = env.obstacles_at(t_s);
    for (std::size_t idx = 0; idx < circles.size(); ++idx) {
        const auto& c = circles[idx];
        const Vec2 v = c.center - pose.position();
        const double center_dist = v.norm();
        const double range = std::max(0.05, center_dist - c.radius_m);
        if (range > rig.range_m) continue;
        const double azimuth = normalize_deg(rad_to_deg(std::atan2(v.y, v.x)) - pose.heading_deg);
        if (std::abs(azimuth) > half_fov) continue;
        const double half = center_dist > c.radius_m ? rad_to_deg(std::asin(c.radius_m / center_dist)) : 89.0;
        const double lo = std::max(-half_fov, azimuth - half);
        const double hi = std::min(half_fov, azimuth + half);

        Detection det;
        det.label = c.label;
        det.confidence = rig.confidence;
        det.distance_hint_m = range;
        det.bbox.x_min = std::clamp(image_x(azimuth + half), 0.0, 1.0);
        det.bbox.x_max = std::clamp(image_x(azimuth - half), 0.0, 1.0);
        auto prior = cam.class_height_priors_m.find(c.label);
        const double height_m = prior != cam.class_height_priors_m.end() ? prior->second : rig.default_object_height_m;
        const double bottom = std::min(1.0, 0.5 + f * rig.camera_height_m / (range * H));
        const double h_norm = std::min(bottom, f * height_m / (range * H));
        det.bbox.y_max = bottom;
        det.bbox.y_min = bottom - h_norm;
        if (!(det.bbox.x_max > det.bbox.x_min) || !(det.bbox.y_max > det.bbox.y_min)) continue;
        candidates.push_back({range, lo, hi, std::move(det), idx});
    }

    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.range_m < b.range_m; });
    std::vector<std::pair<double, double>> nearer;
    for (auto& cand : candidates) {
        if (!detail::covered(cand.lo_deg, cand.hi_deg, nearer)) {
            frame.detections.push_back(cand.det);
            if (sources) sources->push_back(cand.source);
        }
        nearer.emplace_back(cand.lo_deg, cand.hi_deg);
    }
    return frame;
}

}  // namespace hapticnav::sim
