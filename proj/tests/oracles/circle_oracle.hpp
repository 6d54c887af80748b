#pragma once

// Brute-force five-bar forward kinematics used only as a test oracle. It walks the left distal
// circle in small angular steps, brackets every sign change of the closure error and bisects.
// Nothing here calls into the library's kinematics.

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "hapticnav/haptics/kinematics.hpp"

namespace oracle {

inline std::optional<std::pair<double, double>> five_bar_fk(double angle1_deg, double angle2_deg,
                                                            const hapticnav::LinkageGeometry& g) {
    const double pi = 3.14159265358979323846;
    const double t1 = (angle1_deg + g.left_servo_zero_deg) * pi / 180.0;
    const double t2 = (angle2_deg + g.right_servo_zero_deg) * pi / 180.0;
    const double lx = -g.base_separation_mm / 2 + g.proximal_left_mm * std::cos(t1);
    const double ly = g.proximal_left_mm * std::sin(t1);
    const double rx = g.base_separation_mm / 2 + g.proximal_right_mm * std::cos(t2);
    const double ry = g.proximal_right_mm * std::sin(t2);

    auto point = [&](double phi) {
        return std::pair{lx + g.distal_left_mm * std::cos(phi), ly + g.distal_left_mm * std::sin(phi)};
    };
    auto closure = [&](double phi) {
        const auto [x, y] = point(phi);
        return std::hypot(x - rx, y - ry) - g.distal_right_mm;
    };

    std::vector<std::pair<double, double>> roots;
    const int steps = 7200;
    for (int i = 0; i < steps; ++i) {
        double a = 2 * pi * i / steps;
        double b = 2 * pi * (i + 1) / steps;
        double fa = closure(a);
        const double fb = closure(b);
        if (fa == 0.0) {
            roots.push_back(point(a));
            continue;
        }
        if ((fa < 0) == (fb < 0)) continue;
        for (int k = 0; k < 200 && b - a > 1e-15; ++k) {
            const double m = (a + b) / 2;
            const double fm = closure(m);
            if ((fm < 0) == (fa < 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        roots.push_back(point((a + b) / 2));
    }
    if (roots.empty()) return std::nullopt;

    // Assembly mode: the effector sits on the side of the tip-to-tip line given by the sign.
    const double sx = rx - lx, sy = ry - ly;
    for (const auto& r : roots) {
        const double side = sx * (r.second - ly) - sy * (r.first - lx);
        if (side * g.assembly_sign >= 0) return r;
    }
    return roots.front();
}

}  // namespace oracle
