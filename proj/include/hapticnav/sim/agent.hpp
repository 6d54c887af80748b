#pragma once

#include <cmath>
#include <optional>

#include "hapticnav/errors.hpp"
#include "hapticnav/haptics/patterns.hpp"
#include "hapticnav/navigator.hpp"
#include "hapticnav/sim/perception_profile.hpp"

namespace hapticnav::sim {

struct AgentModel {
    double walk_speed_mps = 0.8;
    double turn_rate_dps = 45.0;
    PerceptionProfile perception = PerceptionProfile::perfect();
    double body_radius_m = 0.2;

    void validate() const {
        if (walk_speed_mps < 0.0 || turn_rate_dps < 0.0) throw ConfigError("agent speeds must be non-negative");
        perception.validate();
    }
};

enum class Locomotion { None, Walk, TurnLeft, TurnRight, Pause };

// How a perceived pattern is acted on. Patterns without a navigation meaning are ignored.
inline Locomotion locomotion_for(HapticPatternId perceived) {
    switch (perceived) {
        case HapticPatternId::SlideFrontFast:
        case HapticPatternId::SlideFrontSlow: return Locomotion::Walk;
        case HapticPatternId::SlideLeftFast:
        case HapticPatternId::SlideLeftSlow: return Locomotion::TurnLeft;
        case HapticPatternId::SlideRightFast:
        case HapticPatternId::SlideRightSlow: return Locomotion::TurnRight;
        case HapticPatternId::TapFront: return Locomotion::Pause;
        default: return Locomotion::None;
    }
}

// Kinematic step under one perceived pattern. Turns are in place (CCW positive for left).
inline Pose step_agent(const Pose& pose, std::optional<HapticPatternId> perceived, double dt_s,
                       const AgentModel& model) {
    if (!(dt_s > 0.0)) throw InputError("agent step dt must be positive");
    if (!perceived) return pose;
    Pose next = pose;
    switch (locomotion_for(*perceived)) {
        case Locomotion::Walk: {
            const double h = deg_to_rad(pose.heading_deg);
            next.x_m += model.walk_speed_mps * dt_s * std::cos(h);
            next.y_m += model.walk_speed_mps * dt_s * std::sin(h);
            break;
        }
        case Locomotion::TurnLeft: next.heading_deg = normalize_deg(pose.heading_deg + model.turn_rate_dps * dt_s); break;
        case Locomotion::TurnRight: next.heading_deg = normalize_deg(pose.heading_deg - model.turn_rate_dps * dt_s); break;
        case Locomotion::Pause:
        case Locomotion::None: break;
    }
    return next;
}

}  // namespace hapticnav::sim
