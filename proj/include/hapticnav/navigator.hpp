#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hapticnav/errors.hpp"
#include "hapticnav/geometry.hpp"
#include "hapticnav/haptics/patterns.hpp"

namespace hapticnav {

struct Pose {
    double x_m = 0.0;
    double y_m = 0.0;
    double heading_deg = 0.0;  // CCW from +x, in (-180, 180]

    Vec2 position() const { return {x_m, y_m}; }
    bool operator==(const Pose&) const = default;
};

struct Path {
    std::string name;
    std::vector<Vec2> waypoints;

    void validate() const {
        if (waypoints.size() < 2) throw ConfigError("path '" + name + "' needs at least 2 waypoints");
        for (std::size_t i = 1; i < waypoints.size(); ++i) {
            if (waypoints[i] == waypoints[i - 1]) {
                throw ConfigError("path '" + name + "' repeats waypoint " + std::to_string(i));
            }
        }
    }
};

struct ToleranceConfig {
    double pos_tol_m = 0.3;
    double heading_tol_deg = 15.0;
    double waypoint_radius_m = 0.3;

    void validate() const {
        if (!(pos_tol_m > 0.0 && heading_tol_deg > 0.0 && waypoint_radius_m > 0.0)) {
            throw ConfigError("tolerances must be positive");
        }
    }
};

enum class GuidanceCue { SlideLeft, SlideRight, SlideFront, TapFrontArrived, Finished };

inline std::string_view to_string(GuidanceCue c) {
    switch (c) {
        case GuidanceCue::SlideLeft: return "slide_left";
        case GuidanceCue::SlideRight: return "slide_right";
        case GuidanceCue::SlideFront: return "slide_front";
        case GuidanceCue::TapFrontArrived: return "tap_front_arrived";
        case GuidanceCue::Finished: return "finished";
    }
    return "?";
}

// Navigation cues render with the fast slides so play + rest gap stays inside the 1.25 s budget.
inline std::optional<HapticPatternId> cue_pattern(GuidanceCue c) {
    switch (c) {
        case GuidanceCue::SlideLeft: return HapticPatternId::SlideLeftFast;
        case GuidanceCue::SlideRight: return HapticPatternId::SlideRightFast;
        case GuidanceCue::SlideFront: return HapticPatternId::SlideFrontFast;
        case GuidanceCue::TapFrontArrived: return HapticPatternId::TapFront;
        case GuidanceCue::Finished: return std::nullopt;
    }
    return std::nullopt;
}

struct NavigatorState {
    std::size_t waypoint_index = 0;
    bool finished = false;

    bool operator==(const NavigatorState&) const = default;
};

struct GuidanceStep {
    GuidanceCue cue = GuidanceCue::SlideFront;
    NavigatorState state;
    std::optional<std::size_t> reached_index;
};

inline double bearing_deg(Vec2 from, Vec2 to) {
    return rad_to_deg(std::atan2(to.y - from.y, to.x - from.x));
}

// Signed distance from the line through segment a->b; positive when p lies left of travel.
inline double cross_track_m(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 dir = b - a;
    const double len = dir.norm();
    if (len == 0.0) return 0.0;
    return dir.cross(p - a) / len;
}

inline double heading_error_deg(const Pose& pose, Vec2 target) {
    return normalize_deg(bearing_deg(pose.position(), target) - pose.heading_deg);
}

// Priority: arrival, then heading, then cross-track, then forward. The last waypoint's arrival
// still emits TapFrontArrived and marks the state finished; later calls return Finished.
inline GuidanceStep guidance_step(const Pose& pose, const Path& path, NavigatorState state,
                                  const ToleranceConfig& tol) {
    if (state.finished || state.waypoint_index >= path.waypoints.size()) {
        state.finished = true;
        return {GuidanceCue::Finished, state, std::nullopt};
    }
    const Vec2 target = path.waypoints[state.waypoint_index];
    if (distance(pose.position(), target) <= tol.waypoint_radius_m) {
        const std::size_t reached = state.waypoint_index;
        ++state.waypoint_index;
        if (state.waypoint_index == path.waypoints.size()) state.finished = true;
        return {GuidanceCue::TapFrontArrived, state, reached};
    }
    const double err = heading_error_deg(pose, target);
    if (err > tol.heading_tol_deg) return {GuidanceCue::SlideLeft, state, std::nullopt};
    if (err < -tol.heading_tol_deg) return {GuidanceCue::SlideRight, state, std::nullopt};
    if (state.waypoint_index > 0) {
        const double ct = cross_track_m(pose.position(), path.waypoints[state.waypoint_index - 1], target);
        if (ct > tol.pos_tol_m) return {GuidanceCue::SlideRight, state, std::nullopt};
        if (ct < -tol.pos_tol_m) return {GuidanceCue::SlideLeft, state, std::nullopt};
    }
    return {GuidanceCue::SlideFront, state, std::nullopt};
}

struct TimedPose {
    double t_s = 0.0;
    Pose pose;

    bool operator==(const TimedPose&) const = default;
};

struct TrialMetrics {
    double completion_time_s = 0.0;
    double pct_time_outside_tolerance = 0.0;
    int exit_reenter_count = 0;
    int waypoints_reached = 0;

    bool operator==(const TrialMetrics&) const = default;
};

// Replays arrival along the trajectory to know the active segment at each sample. Samples before
// the first arrival (no segment yet) count as inside.
inline TrialMetrics compute_metrics(const std::vector<TimedPose>& trajectory, const Path& path,
                                    const ToleranceConfig& tol) {
    if (trajectory.empty()) throw InputError("empty trajectory");
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        if (trajectory[i].t_s < trajectory[i - 1].t_s) throw InputError("trajectory is not time-sorted");
    }
    TrialMetrics m;
    m.completion_time_s = trajectory.back().t_s - trajectory.front().t_s;
    std::size_t index = 0;
    std::size_t outside = 0;
    bool was_outside = false;
    for (const auto& sample : trajectory) {
        const Vec2 p = sample.pose.position();
        if (index < path.waypoints.size() && distance(p, path.waypoints[index]) <= tol.waypoint_radius_m) {
            ++index;
            ++m.waypoints_reached;
        }
        bool out = false;
        if (index > 0 && index < path.waypoints.size()) {
            out = std::abs(cross_track_m(p, path.waypoints[index - 1], path.waypoints[index])) > tol.pos_tol_m;
        }
        if (out) ++outside;
        if (out && !was_outside) ++m.exit_reenter_count;
        was_outside = out;
    }
    m.pct_time_outside_tolerance = 100.0 * static_cast<double>(outside) / static_cast<double>(trajectory.size());
    return m;
}

}  // namespace hapticnav
