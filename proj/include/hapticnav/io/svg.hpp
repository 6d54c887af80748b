#pragma once

#include <string>
#include <vector>

#include "hapticnav/io/csv.hpp"
#include "hapticnav/navigator.hpp"
#include "hapticnav/sim/environment.hpp"

namespace hapticnav::io {

// Top-down trial plot: room, tolerance band along the path, waypoints, obstacles (at t = 0),
// and one polyline per trajectory. Room y grows upward; SVG y grows downward.
inline std::string trajectory_svg(const Path& path, const sim::Environment& env, const ToleranceConfig& tol,
                                  const std::vector<std::vector<TimedPose>>& trajectories) {
    const double scale = 100.0;
    const double pad = 20.0;
    const double w = env.room.width_m * scale + 2 * pad;
    const double h = env.room.depth_m * scale + 2 * pad;
    auto X = [&](double x) { return fmt("%.2f", pad + x * scale); };
    auto Y = [&](double y) { return fmt("%.2f", pad + (env.room.depth_m - y) * scale); };
    auto polyline = [&](const std::vector<Vec2>& pts) {
        std::string s;
        for (const auto& p : pts) s += X(p.x) + "," + Y(p.y) + " ";
        return s;
    };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", w) + "\" height=\"" +
                      fmt("%.0f", h) + "\" viewBox=\"0 0 " + fmt("%.0f", w) + " " + fmt("%.0f", h) + "\">\n";
    out += "<title>" + path.name + " in " + env.name + "</title>\n";
    out += "<rect x=\"" + X(0) + "\" y=\"" + Y(env.room.depth_m) + "\" width=\"" + fmt("%.2f", env.room.width_m * scale) +
           "\" height=\"" + fmt("%.2f", env.room.depth_m * scale) + "\" fill=\"white\" stroke=\"black\"/>\n";
    out += "<polyline class=\"band\" points=\"" + polyline(path.waypoints) +
           "\" fill=\"none\" stroke=\"#9ecae1\" stroke-opacity=\"0.6\" stroke-linejoin=\"round\" stroke-linecap=\"round\" "
           "stroke-width=\"" + fmt("%.2f", 2 * tol.pos_tol_m * scale) + "\"/>\n";
    out += "<polyline class=\"path\" points=\"" + polyline(path.waypoints) +
           "\" fill=\"none\" stroke=\"#3182bd\" stroke-dasharray=\"6 4\" stroke-width=\"2\"/>\n";
    for (const auto& o : env.static_obstacles) {
        out += "<circle class=\"obstacle\" cx=\"" + X(o.position.x) + "\" cy=\"" + Y(o.position.y) + "\" r=\"" +
               fmt("%.2f", o.radius_m * scale) + "\" fill=\"#bbbbbb\"/>\n";
    }
    for (const auto& o : env.dynamic_obstacles) {
        const Vec2 p = o.position_at(0.0);
        out += "<circle class=\"obstacle dynamic\" cx=\"" + X(p.x) + "\" cy=\"" + Y(p.y) + "\" r=\"" +
               fmt("%.2f", o.radius_m * scale) + "\" fill=\"#fdae6b\"/>\n";
    }
    for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
        const auto& p = path.waypoints[i];
        out += "<circle class=\"waypoint\" cx=\"" + X(p.x) + "\" cy=\"" + Y(p.y) + "\" r=\"" +
               fmt("%.2f", tol.waypoint_radius_m * scale) + "\" fill=\"none\" stroke=\"#31a354\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + X(p.x) + "\" y=\"" + Y(p.y) + "\" font-size=\"14\" text-anchor=\"middle\">" +
               std::to_string(i + 1) + "</text>\n";
    }
    for (const auto& traj : trajectories) {
        std::vector<Vec2> pts;
        pts.reserve(traj.size());
        for (const auto& s : traj) pts.push_back(s.pose.position());
        out += "<polyline class=\"trajectory\" points=\"" + polyline(pts) +
               "\" fill=\"none\" stroke=\"#e6550d\" stroke-opacity=\"0.7\" stroke-width=\"1.5\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace hapticnav::io
