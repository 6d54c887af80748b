#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "hapticnav/errors.hpp"
#include "hapticnav/geometry.hpp"
#include "hapticnav/haptics/patterns.hpp"

namespace hapticnav {

// Planar five-bar linkage: two servos on the base line, each driving a proximal link; the two
// distal links meet at the end-effector that touches the temple.
//
// Frame: servo axes at (-base/2, 0) and (+base/2, 0). A link angle is measured counter-clockwise
// from +x. Servo angles are link angles minus the servo's mounting zero, so mirrored servos read
// (a, 180 - a) for mirror-symmetric poses.
struct LinkageGeometry {
    double base_separation_mm = 30.0;
    double proximal_left_mm = 25.0;
    double proximal_right_mm = 25.0;
    double distal_left_mm = 35.0;
    double distal_right_mm = 35.0;

    // Contact line: position p maps to contact_origin + p * contact_direction.
    Vec2 contact_origin{-35.0, 26.0};
    Vec2 contact_direction{1.0, 0.0};
    // Pressing moves the effector along press_direction by pressure * gain * press_depth_mm.
    Vec2 press_direction{0.0, -1.0};
    double press_depth_mm = 2.0;
    double retract_mm = 1.5;

    // IK leg modes: +1 takes the counter-clockwise elbow, -1 the clockwise one.
    int left_elbow = -1;
    int right_elbow = +1;
    // FK assembly mode: sign of cross(tip_right - tip_left, effector - tip_left).
    int assembly_sign = -1;

    double left_servo_zero_deg = -90.0;
    double right_servo_zero_deg = 90.0;
    double servo_min_deg = 0.0;
    double servo_max_deg = 180.0;

    Vec2 left_base() const { return {-base_separation_mm / 2.0, 0.0}; }
    Vec2 right_base() const { return {base_separation_mm / 2.0, 0.0}; }

    bool symmetric() const {
        return proximal_left_mm == proximal_right_mm && distal_left_mm == distal_right_mm &&
               left_elbow == -right_elbow && left_servo_zero_deg == -right_servo_zero_deg;
    }
};

struct Calibration {
    double pressure_gain_left = 1.0;
    double pressure_gain_right = 1.0;
    double position_offset_left_mm = 0.0;
    double position_offset_right_mm = 0.0;

    double gain(Temple t) const { return t == Temple::Left ? pressure_gain_left : pressure_gain_right; }
    double offset(Temple t) const { return t == Temple::Left ? position_offset_left_mm : position_offset_right_mm; }

    void validate() const {
        for (double g : {pressure_gain_left, pressure_gain_right}) {
            if (!(g > 0.0 && g <= 2.0)) throw ConfigError("pressure gain must lie in (0, 2]");
        }
        for (double o : {position_offset_left_mm, position_offset_right_mm}) {
            if (!std::isfinite(o) || std::abs(o) >= kWorkspaceMm) throw ConfigError("position offset out of range");
        }
    }
};

struct ServoAngles {
    double angle1_deg = 0.0;  // left servo
    double angle2_deg = 0.0;  // right servo
};

struct CircleIntersection {
    int count = 0;  // 0, 1 or 2; -1 for coincident circles
    Vec2 a;
    Vec2 b;
};

inline CircleIntersection intersect_circles(Vec2 c0, double r0, Vec2 c1, double r1) {
    const Vec2 d = c1 - c0;
    const double dist = d.norm();
    if (dist < 1e-12) return {r0 == r1 ? -1 : 0, {}, {}};
    if (dist > r0 + r1 || dist < std::abs(r0 - r1)) return {0, {}, {}};
    const double along = (r0 * r0 - r1 * r1 + dist * dist) / (2.0 * dist);
    const double h = std::sqrt(std::max(0.0, r0 * r0 - along * along));
    const Vec2 u = d * (1.0 / dist);
    const Vec2 mid = c0 + u * along;
    const Vec2 perp{-u.y, u.x};
    return {h == 0.0 ? 1 : 2, mid + perp * h, mid - perp * h};
}

inline void check_servo_limits(const ServoAngles& a, const LinkageGeometry& g) {
    for (double v : {a.angle1_deg, a.angle2_deg}) {
        if (!std::isfinite(v) || v < g.servo_min_deg || v > g.servo_max_deg) {
            throw KinematicsError("servo angle " + std::to_string(v) + " outside limits [" +
                                  std::to_string(g.servo_min_deg) + ", " + std::to_string(g.servo_max_deg) + "]");
        }
    }
}

struct LinkageTips {
    Vec2 left;
    Vec2 right;
};

inline LinkageTips proximal_tips(const ServoAngles& a, const LinkageGeometry& g) {
    const double th1 = deg_to_rad(a.angle1_deg + g.left_servo_zero_deg);
    const double th2 = deg_to_rad(a.angle2_deg + g.right_servo_zero_deg);
    return {g.left_base() + Vec2{std::cos(th1), std::sin(th1)} * g.proximal_left_mm,
            g.right_base() + Vec2{std::cos(th2), std::sin(th2)} * g.proximal_right_mm};
}

inline Vec2 forward_kinematics(const ServoAngles& angles, const LinkageGeometry& g) {
    check_servo_limits(angles, g);
    const LinkageTips tips = proximal_tips(angles, g);
    const CircleIntersection hit = intersect_circles(tips.left, g.distal_left_mm, tips.right, g.distal_right_mm);
    if (hit.count == 0) throw KinematicsError("distal links cannot close: configuration unreachable");
    if (hit.count < 0) throw KinematicsError("proximal tips coincide: configuration singular");
    const Vec2 span = tips.right - tips.left;
    const double side_a = span.cross(hit.a - tips.left);
    return (side_a * g.assembly_sign >= 0.0) ? hit.a : hit.b;
}

inline Vec2 contact_point(double position_mm, double pressure, const LinkageGeometry& g, const Calibration& cal,
                          Temple temple) {
    const double p = position_mm + cal.offset(temple);
    if (!std::isfinite(p) || p < 0.0 || p > kWorkspaceMm) {
        throw KinematicsError("contact position " + std::to_string(p) + " mm outside [0, 70] workspace");
    }
    return g.contact_origin + g.contact_direction * p + g.press_direction * (pressure * cal.gain(temple) * g.press_depth_mm);
}

// Retracted, non-contact pose at the middle of the temple.
inline Vec2 rest_point(const LinkageGeometry& g) {
    return g.contact_origin + g.contact_direction * kRestPositionMm - g.press_direction * g.retract_mm;
}

inline ServoAngles solve_ik(Vec2 target, const LinkageGeometry& g) {
    auto leg = [&](Vec2 base, double proximal, double distal, int elbow, double zero) {
        const Vec2 d = target - base;
        const double r = d.norm();
        if (r < 1e-9) throw KinematicsError("target coincides with a servo axis");
        const double c = (proximal * proximal + r * r - distal * distal) / (2.0 * proximal * r);
        if (c < -1.0 || c > 1.0) throw KinematicsError("target out of reach");
        const double link = std::atan2(d.y, d.x) + elbow * std::acos(c);
        // Wrap into the servo's frame so equivalent angles compare against the limits.
        return normalize_deg(rad_to_deg(link) - zero - 90.0) + 90.0;
    };
    ServoAngles a{leg(g.left_base(), g.proximal_left_mm, g.distal_left_mm, g.left_elbow, g.left_servo_zero_deg),
                  leg(g.right_base(), g.proximal_right_mm, g.distal_right_mm, g.right_elbow, g.right_servo_zero_deg)};
    check_servo_limits(a, g);
    return a;
}

inline ServoAngles inverse_kinematics(double position_mm, const LinkageGeometry& g, const Calibration& cal,
                                      Temple temple = Temple::Left, double pressure = 0.0) {
    return solve_ik(contact_point(position_mm, pressure, g, cal, temple), g);
}

// Every contact position (at zero and full pressure) plus the rest pose must be reachable,
// within servo limits, and round-trip through FK on the configured assembly branch.
inline void validate_geometry(const LinkageGeometry& g, double max_gain = 2.0) {
    for (double v : {g.base_separation_mm, g.proximal_left_mm, g.proximal_right_mm, g.distal_left_mm,
                     g.distal_right_mm}) {
        if (!(v > 0.0)) throw ConfigError("linkage lengths must be positive");
    }
    if (std::abs(g.contact_direction.norm() - 1.0) > 1e-9 || std::abs(g.press_direction.norm() - 1.0) > 1e-9) {
        throw ConfigError("contact and press directions must be unit vectors");
    }
    if (std::abs(g.left_elbow) != 1 || std::abs(g.right_elbow) != 1 || std::abs(g.assembly_sign) != 1) {
        throw ConfigError("elbow and assembly signs must be +1 or -1");
    }
    auto check = [&](Vec2 target, const std::string& what) {
        try {
            const ServoAngles a = solve_ik(target, g);
            const Vec2 back = forward_kinematics(a, g);
            if (distance(back, target) > 1e-6) throw KinematicsError("assembly branch mismatch");
        } catch (const KinematicsError& e) {
            throw ConfigError("linkage cannot render " + what + ": " + e.what());
        }
    };
    for (int i = 0; i <= 140; ++i) {
        const double p = i * 0.5;
        const Vec2 on_line = g.contact_origin + g.contact_direction * p;
        check(on_line, "position " + std::to_string(p) + " mm");
        check(on_line + g.press_direction * (max_gain * g.press_depth_mm), "pressed position " + std::to_string(p) + " mm");
    }
    check(rest_point(g), "rest pose");
}

}  // namespace hapticnav
