#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "hapticnav/haptics/patterns.hpp"
#include "hapticnav/navigator.hpp"

namespace hapticnav::io {

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Contact track sampled every 1000/tick_hz ms from 0 to duration inclusive, per active temple.
inline std::string trajectory_csv(const PatternTrajectory& traj, int tick_hz = 50) {
    const std::int64_t step = 1000 / tick_hz;
    std::string out = "t_ms,temple,position_mm,pressure\n";
    for (std::int64_t t = 0; t <= traj.duration_ms; t += step) {
        for (Temple temple : {Temple::Left, Temple::Right}) {
            if (!traj.uses(temple)) continue;
            const ContactKeyframe k = sample_track(traj.track(temple), t);
            out += std::to_string(t) + "," + std::string(to_string(temple)) + "," + fmt("%.3f", k.position_mm) + "," +
                   fmt("%.4f", k.pressure) + "\n";
        }
    }
    return out;
}

inline std::string pose_log_csv(const std::vector<TimedPose>& samples) {
    std::string out = "t_s,x_m,y_m,heading_deg\n";
    for (const auto& s : samples) {
        out += fmt("%.3f", s.t_s) + "," + fmt("%.6f", s.pose.x_m) + "," + fmt("%.6f", s.pose.y_m) + "," +
               fmt("%.4f", s.pose.heading_deg) + "\n";
    }
    return out;
}

}  // namespace hapticnav::io
