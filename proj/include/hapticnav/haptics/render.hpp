#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hapticnav/errors.hpp"
#include "hapticnav/haptics/kinematics.hpp"
#include "hapticnav/haptics/patterns.hpp"

namespace hapticnav {

// Servo targets are carried in integer centidegrees, the resolution of the device link.
struct ServoCommand {
    std::int64_t t_ms = 0;
    Temple temple = Temple::Left;
    std::int32_t angle1_cdeg = 9000;
    std::int32_t angle2_cdeg = 9000;

    double angle1_deg() const { return angle1_cdeg / 100.0; }
    double angle2_deg() const { return angle2_cdeg / 100.0; }

    bool operator==(const ServoCommand&) const = default;
};

inline std::int32_t to_centidegrees(double deg) { return static_cast<std::int32_t>(std::llround(deg * 100.0)); }

class RenderError : public KinematicsError {
public:
    RenderError(const std::string& what, std::size_t tick) : KinematicsError(what), tick_(tick) {}
    std::size_t tick() const noexcept { return tick_; }

private:
    std::size_t tick_;
};

inline std::size_t tick_count(std::int64_t duration_ms, int tick_hz) {
    return static_cast<std::size_t>(duration_ms * tick_hz / 1000);
}

// One command per tick per active temple, ticks at k * (1000 / tick_hz) ms for k in [0, n).
inline std::vector<ServoCommand> render(const PatternTrajectory& traj, const LinkageGeometry& geom,
                                        const Calibration& cal, int tick_hz = 50) {
    if (tick_hz <= 0 || 1000 % tick_hz != 0) throw ConfigError("tick rate must divide 1000 Hz");
    const std::int64_t period_ms = 1000 / tick_hz;
    const std::size_t n = tick_count(traj.duration_ms, tick_hz);
    std::vector<ServoCommand> out;
    for (Temple temple : {Temple::Left, Temple::Right}) {
        if (!traj.uses(temple)) continue;
        const auto track = traj.track(temple);
        for (std::size_t k = 0; k < n; ++k) {
            const std::int64_t t = static_cast<std::int64_t>(k) * period_ms;
            const ContactKeyframe s = sample_track(track, t);
            try {
                const Vec2 target = s.pressure > 0.0 ? contact_point(s.position_mm, s.pressure, geom, cal, temple)
                                                     : rest_point(geom);
                const ServoAngles a = solve_ik(target, geom);
                out.push_back({t, temple, to_centidegrees(a.angle1_deg), to_centidegrees(a.angle2_deg)});
            } catch (const KinematicsError& e) {
                throw RenderError(std::string(to_string(traj.pattern)) + " tick " + std::to_string(k) + ": " + e.what(), k);
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const ServoCommand& a, const ServoCommand& b) {
        if (a.t_ms != b.t_ms) return a.t_ms < b.t_ms;
        return a.temple < b.temple;
    });
    return out;
}

}  // namespace hapticnav
