#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hapticnav/errors.hpp"
#include "hapticnav/haptics/scheduler.hpp"
#include "hapticnav/navigator.hpp"
#include "hapticnav/sim/agent.hpp"
#include "hapticnav/sim/environment.hpp"
#include "hapticnav/sim/perception_profile.hpp"
#include "hapticnav/sim/rng.hpp"

namespace hapticnav::sim {

struct TrialConfig {
    int tick_hz = 10;
    double timeout_s = 600.0;
    SchedulerConfig scheduler;
    ToleranceConfig tolerance;

    void validate() const {
        if (tick_hz <= 0 || 1000 % tick_hz != 0) throw ConfigError("trial tick rate must divide 1000 Hz");
        if (!(timeout_s > 0.0)) throw ConfigError("trial timeout must be positive");
        tolerance.validate();
    }
};

struct CueRecord {
    std::int64_t t_ms = 0;
    HapticPatternId pattern = HapticPatternId::TapCenter;
    HapticPatternId perceived = HapticPatternId::TapCenter;

    bool operator==(const CueRecord&) const = default;
};

struct GuidanceRecord {
    std::int64_t t_ms = 0;
    GuidanceCue cue = GuidanceCue::SlideFront;

    bool operator==(const GuidanceRecord&) const = default;
};

struct ArrivalRecord {
    std::int64_t t_ms = 0;
    std::size_t waypoint_index = 0;

    bool operator==(const ArrivalRecord&) const = default;
};

struct TrialResult {
    std::string path_name;
    std::string environment_name;
    std::string perception_name;
    std::uint64_t seed = 0;
    bool completed = false;
    std::vector<TimedPose> trajectory;
    std::vector<CueRecord> cues;             // patterns as played, with what the agent perceived
    std::vector<GuidanceRecord> guidance;    // navigator output, recorded when it changes
    std::vector<ArrivalRecord> arrivals;
    TrialMetrics metrics;

    bool operator==(const TrialResult&) const = default;
};

// Turns played patterns into agent actions. A started pattern is recognized one reaction
// latency after onset and acted on until the stimulus ends; a perceived tap-front freezes the
// agent for one further latency.
class CueFollower {
public:
    explicit CueFollower(std::int64_t reaction_latency_ms) : latency_ms_(reaction_latency_ms) {}

    void begin(const Playback& p, HapticPatternId perceived) { stimulus_ = Stimulus{p, perceived, false}; }

    std::optional<HapticPatternId> acting(std::int64_t t_ms) {
        if (!stimulus_ || t_ms < stimulus_->playback.start_ms + latency_ms_) return std::nullopt;
        if (!stimulus_->recognized) {
            stimulus_->recognized = true;
            if (locomotion_for(stimulus_->perceived) == Locomotion::Pause) hold_until_ms_ = t_ms + latency_ms_;
        }
        if (t_ms < stimulus_->playback.end_ms && t_ms >= hold_until_ms_) return stimulus_->perceived;
        return std::nullopt;
    }

    void reset() {
        stimulus_.reset();
        hold_until_ms_ = std::numeric_limits<std::int64_t>::min();
    }

private:
    struct Stimulus {
        Playback playback;
        HapticPatternId perceived;
        bool recognized = false;
    };
    std::int64_t latency_ms_;
    std::optional<Stimulus> stimulus_;
    std::int64_t hold_until_ms_ = std::numeric_limits<std::int64_t>::min();
};

// Moves the agent unless the new position leaves the room or hits an obstacle.
inline Pose constrained_step(const Pose& pose, std::optional<HapticPatternId> acting, double dt_s,
                             const AgentModel& agent, const Environment& env, double t_next_s) {
    Pose next = step_agent(pose, acting, dt_s, agent);
    if (!env.room.contains(next.position()) || env.blocked(next.position(), t_next_s, agent.body_radius_m)) {
        next.x_m = pose.x_m;
        next.y_m = pose.y_m;
    }
    return next;
}

// Closed loop per tick: navigator cue -> scheduler gate -> perceived pattern -> agent motion.
inline TrialResult run_navigation_trial(const Path& path, const Environment& env, const AgentModel& agent,
                                        const TrialConfig& cfg, std::uint64_t seed) {
    path.validate();
    env.validate();
    agent.validate();
    cfg.validate();

    TrialResult result;
    result.path_name = path.name;
    result.environment_name = env.name;
    result.perception_name = agent.perception.name;
    result.seed = seed;

    Rng rng(seed);
    HapticScheduler scheduler(cfg.scheduler);
    NavigatorState nav;
    Pose pose{path.waypoints[0].x, path.waypoints[0].y, bearing_deg(path.waypoints[0], path.waypoints[1])};
    const std::int64_t tick_ms = 1000 / cfg.tick_hz;
    const double dt_s = tick_ms / 1000.0;
    const auto timeout_ms = static_cast<std::int64_t>(std::llround(cfg.timeout_s * 1000.0));
    CueFollower follower(static_cast<std::int64_t>(std::llround(agent.perception.reaction_latency_ms)));

    auto begin = [&](const Playback& p) {
        const HapticPatternId perceived = sample_perceived(p.pattern, agent.perception, rng);
        result.cues.push_back({p.start_ms, p.pattern, perceived});
        follower.begin(p, perceived);
    };

    for (std::int64_t k = 0;; ++k) {
        const std::int64_t t = k * tick_ms;
        result.trajectory.push_back({t / 1000.0, pose});
        if (t > timeout_ms) break;

        for (const auto& p : scheduler.advance(t)) begin(p);

        const GuidanceStep g = guidance_step(pose, path, nav, cfg.tolerance);
        nav = g.state;
        if (g.reached_index) result.arrivals.push_back({t, *g.reached_index});
        if (result.guidance.empty() || result.guidance.back().cue != g.cue || g.reached_index) {
            result.guidance.push_back({t, g.cue});
        }
        if (auto pattern = cue_pattern(g.cue)) {
            if (scheduler.submit(*pattern, t) == SubmitResult::Accepted) begin(*scheduler.current());
        }
        if (nav.finished) {
            result.completed = true;
            break;
        }
        pose = constrained_step(pose, follower.acting(t), dt_s, agent, env, (t + tick_ms) / 1000.0);
    }
    result.metrics = compute_metrics(result.trajectory, path, cfg.tolerance);
    return result;
}

}  // namespace hapticnav::sim
