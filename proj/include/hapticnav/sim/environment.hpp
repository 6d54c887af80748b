#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hapticnav/errors.hpp"
#include "hapticnav/geometry.hpp"

namespace hapticnav::sim {

struct Room {
    double width_m = 6.0;
    double depth_m = 6.0;

    bool contains(Vec2 p, double margin = 0.0) const {
        return p.x >= margin && p.y >= margin && p.x <= width_m - margin && p.y <= depth_m - margin;
    }
};

struct StaticObstacle {
    Vec2 position;
    double radius_m = 0.25;
    std::string label = "chair";
};

// Moves along a closed polyline loop at constant speed, starting at loop[0] at t = 0.
struct DynamicObstacle {
    std::string label = "chair";
    double radius_m = 0.25;
    std::vector<Vec2> loop;
    double speed_mps = 0.5;
    double phase_m = 0.0;  // arc length already travelled at t = 0

    double loop_length() const {
        double len = 0.0;
        for (std::size_t i = 0; i < loop.size(); ++i) len += distance(loop[i], loop[(i + 1) % loop.size()]);
        return len;
    }

    Vec2 position_at(double t_s) const {
        if (loop.empty()) return {};
        const double len = loop_length();
        if (loop.size() == 1 || len <= 0.0) return loop.front();
        double s = std::fmod(phase_m + speed_mps * t_s, len);
        if (s < 0.0) s += len;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Vec2 a = loop[i];
            const Vec2 b = loop[(i + 1) % loop.size()];
            const double seg = distance(a, b);
            if (s <= seg && seg > 0.0) return a + (b - a) * (s / seg);
            s -= seg;
        }
        return loop.front();
    }
};

struct Environment {
    std::string name = "empty";
    Room room;
    std::vector<StaticObstacle> static_obstacles;
    std::vector<DynamicObstacle> dynamic_obstacles;

    void validate() const {
        if (!(room.width_m > 0.0 && room.depth_m > 0.0)) throw ConfigError("room dimensions must be positive");
        for (const auto& o : static_obstacles) {
            if (!(o.radius_m > 0.0)) throw ConfigError("obstacle radius must be positive");
            if (!room.contains(o.position)) throw ConfigError("static obstacle '" + o.label + "' lies outside the room");
        }
        for (const auto& o : dynamic_obstacles) {
            if (!(o.radius_m > 0.0)) throw ConfigError("obstacle radius must be positive");
            if (o.loop.empty()) throw ConfigError("dynamic obstacle '" + o.label + "' has no loop");
            if (o.speed_mps < 0.0) throw ConfigError("dynamic obstacle speed must be non-negative");
            for (const auto& p : o.loop) {
                if (!room.contains(p)) throw ConfigError("dynamic obstacle '" + o.label + "' loop leaves the room");
            }
        }
    }

    struct Circle {
        Vec2 center;
        double radius_m;
        std::string label;
    };

    std::vector<Circle> obstacles_at(double t_s) const {
        std::vector<Circle> out;
        for (const auto& o : static_obstacles) out.push_back({o.position, o.radius_m, o.label});
        for (const auto& o : dynamic_obstacles) out.push_back({o.position_at(t_s), o.radius_m, o.label});
        return out;
    }

    bool blocked(Vec2 p, double t_s, double body_radius_m = 0.0) const {
        for (const auto& c : obstacles_at(t_s)) {
            if (distance(p, c.center) < c.radius_m + body_radius_m) return true;
        }
        return false;
    }
};

}  // namespace hapticnav::sim
