#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hapticnav/errors.hpp"
#include "hapticnav/haptics/scheduler.hpp"
#include "hapticnav/io/json.hpp"
#include "hapticnav/navigator.hpp"
#include "hapticnav/pipeline.hpp"
#include "hapticnav/sim/camera.hpp"
#include "hapticnav/sim/trial.hpp"

namespace hapticnav::gateway {

enum class SessionMode { HumanSteered, Scripted };
enum class SteerAction { Left, Right, Forward, Stop };

inline std::string_view to_string(SessionMode m) { return m == SessionMode::HumanSteered ? "human" : "scripted"; }

inline std::string_view to_string(SteerAction a) {
    switch (a) {
        case SteerAction::Left: return "left";
        case SteerAction::Right: return "right";
        case SteerAction::Forward: return "forward";
        case SteerAction::Stop: return "stop";
    }
    return "stop";
}

// --- client messages --------------------------------------------------------------------------

struct Start {
    std::string path = "path1";
    std::string env = "empty";
    std::string perception = "perfect";
    SessionMode mode = SessionMode::HumanSteered;
    std::uint64_t seed = 1;
};
struct Steer {
    SteerAction action = SteerAction::Stop;
};
struct SetSensitivity {
    Sensitivity level = Sensitivity::Medium;
};
struct Reset {};

using ClientMessage = std::variant<Start, Steer, SetSensitivity, Reset>;

// Protocol violation with a machine-readable code.
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(std::string code, const std::string& text) : std::runtime_error(text), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

inline ClientMessage parse_client_message(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ProtocolError("bad_json", e.what());
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        throw ProtocolError("bad_message", "message must be an object with a string \"type\"");
    }
    const std::string type = j["type"].get<std::string>();
    try {
        if (type == "start") {
            Start s;
            s.path = io::get_or(j, "path", s.path);
            s.env = io::get_or(j, "env", s.env);
            s.perception = io::get_or(j, "perception", s.perception);
            const std::string mode = io::get_or(j, "mode", std::string("human"));
            if (mode == "human") s.mode = SessionMode::HumanSteered;
            else if (mode == "scripted") s.mode = SessionMode::Scripted;
            else throw ProtocolError("bad_message", "mode must be human or scripted");
            s.seed = io::get_or<std::uint64_t>(j, "seed", 1);
            return s;
        }
        if (type == "steer") {
            const std::string a = j.at("action").get<std::string>();
            for (SteerAction act : {SteerAction::Left, SteerAction::Right, SteerAction::Forward, SteerAction::Stop}) {
                if (a == to_string(act)) return Steer{act};
            }
            throw ProtocolError("bad_message", "steer action must be left, right, forward or stop");
        }
        if (type == "set_sensitivity") return SetSensitivity{parse_sensitivity(j.at("level").get<std::string>())};
        if (type == "reset") return Reset{};
    } catch (const json::exception& e) {
        throw ProtocolError("bad_message", e.what());
    } catch (const InputError& e) {
        throw ProtocolError("bad_message", e.what());
    }
    throw ProtocolError("unknown_type", "unknown message type '" + type + "'");
}

inline json to_json_message(const ClientMessage& m) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Start>) {
                return {{"type", "start"}, {"path", v.path}, {"env", v.env}, {"perception", v.perception},
                        {"mode", to_string(v.mode)}, {"seed", v.seed}};
            } else if constexpr (std::is_same_v<T, Steer>) {
                return {{"type", "steer"}, {"action", to_string(v.action)}};
            } else if constexpr (std::is_same_v<T, SetSensitivity>) {
                return {{"type", "set_sensitivity"}, {"level", to_string(v.level)}};
            } else {
                return {{"type", "reset"}};
            }
        },
        m);
}

// --- server messages --------------------------------------------------------------------------

struct SessionStarted {
    Path path;
    sim::Environment env;
    ToleranceConfig tolerance;
    SessionMode mode = SessionMode::HumanSteered;
    int tick_hz = 20;
};
struct PoseUpdate {
    std::int64_t tick = 0;
    std::int64_t t_ms = 0;
    Pose pose;
    bool inside_band = true;
};
struct CueEvent {
    std::int64_t tick = 0;
    std::int64_t t_ms = 0;
    GuidanceCue cue = GuidanceCue::SlideFront;
    PatternTrajectory trajectory;
};
struct SceneUpdate {
    std::int64_t tick = 0;
    SceneSummary summary;
};
struct WaypointReached {
    std::int64_t tick = 0;
    std::size_t index = 0;
};
struct TrialComplete {
    std::int64_t tick = 0;
    bool completed = false;
    TrialMetrics metrics;
};
struct Error {
    std::string code;
    std::string text;
};

using ServerMessage =
    std::variant<SessionStarted, PoseUpdate, CueEvent, SceneUpdate, WaypointReached, TrialComplete, Error>;

inline std::string_view message_type(const ServerMessage& m) {
    static constexpr std::array<std::string_view, 7> names{"session_started", "pose_update",    "cue_event",
                                                           "scene_update",    "waypoint_reached", "trial_complete",
                                                           "error"};
    return names[m.index()];
}

inline json to_json_message(const ServerMessage& m, const std::string& session_id) {
    json j = std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SessionStarted>) {
                return {{"path", v.path}, {"environment", v.env}, {"tolerance", v.tolerance},
                        {"mode", to_string(v.mode)}, {"tick_hz", v.tick_hz}};
            } else if constexpr (std::is_same_v<T, PoseUpdate>) {
                return {{"tick", v.tick}, {"t_ms", v.t_ms}, {"pose", v.pose}, {"inside_band", v.inside_band}};
            } else if constexpr (std::is_same_v<T, CueEvent>) {
                return {{"tick", v.tick},
                        {"t_ms", v.t_ms},
                        {"cue", to_string(v.cue)},
                        {"pattern", to_string(v.trajectory.pattern)},
                        {"duration_ms", v.trajectory.duration_ms},
                        {"trajectory", v.trajectory}};
            } else if constexpr (std::is_same_v<T, SceneUpdate>) {
                return {{"tick", v.tick}, {"summary", v.summary}};
            } else if constexpr (std::is_same_v<T, WaypointReached>) {
                return {{"tick", v.tick}, {"index", v.index}};
            } else if constexpr (std::is_same_v<T, TrialComplete>) {
                return {{"tick", v.tick}, {"completed", v.completed}, {"metrics", v.metrics}};
            } else {
                return {{"code", v.code}, {"text", v.text}};
            }
        },
        m);
    j["type"] = message_type(m);
    j["session_id"] = session_id;
    return j;
}

// --- session ----------------------------------------------------------------------------------

// Named paths, environments and perception profiles a client may start with.
struct SessionCatalog {
    std::map<std::string, Path> paths;
    std::map<std::string, sim::Environment> environments;
    std::map<std::string, sim::PerceptionProfile> profiles;

    // Every *.json under <dir>/paths and <dir>/envs, keyed by file stem.
    static SessionCatalog load(const std::filesystem::path& data_dir) {
        SessionCatalog c;
        auto each_json = [](const std::filesystem::path& dir, auto&& fn) {
            if (!std::filesystem::is_directory(dir)) throw ConfigError("missing data directory '" + dir.string() + "'");
            for (const auto& e : std::filesystem::directory_iterator(dir)) {
                if (e.path().extension() == ".json") fn(e.path().stem().string(), io::read_json_file(e.path().string()));
            }
        };
        each_json(data_dir / "paths", [&](const std::string& stem, const json& j) { c.paths[stem] = j.get<Path>(); });
        each_json(data_dir / "envs",
                  [&](const std::string& stem, const json& j) { c.environments[stem] = j.get<sim::Environment>(); });
        c.profiles["perfect"] = sim::PerceptionProfile::perfect();
        c.profiles["table_one"] = sim::PerceptionProfile::table_one();
        return c;
    }
};

struct SessionConfig {
    int tick_hz = 20;
    int scene_every_ticks = 4;  // 5 Hz scene updates at the default tick
    double timeout_s = 600.0;
    sim::AgentModel agent;
    ToleranceConfig tolerance;
    SchedulerConfig scheduler;
    CameraModel camera = CameraModel::defaults();
    sim::CameraRig rig;
    PerceptionConfig perception;
    SceneConfig scene;

    void validate() const {
        if (tick_hz <= 0 || 1000 % tick_hz != 0) throw ConfigError("session tick rate must divide 1000 Hz");
        if (scene_every_ticks <= 0) throw ConfigError("scene_every_ticks must be positive");
        if (!(timeout_s > 0.0)) throw ConfigError("session timeout must be positive");
        agent.validate();
        tolerance.validate();
        camera.validate();
        scene.validate();
    }
};

struct SessionState {
    std::string session_id;
    bool started = false;
    bool complete = false;
    SessionMode mode = SessionMode::HumanSteered;
    Start start;
    Path path;
    sim::Environment env;
    sim::PerceptionProfile profile;
    Sensitivity sensitivity = Sensitivity::Medium;
    Pose pose;
    NavigatorState nav;
    HapticScheduler scheduler;
    std::int64_t tick = 0;  // ticks simulated since Start
    std::vector<TimedPose> trajectory;
    std::optional<ScenePipeline> scene;
    std::optional<sim::CueFollower> follower;
    std::optional<sim::Rng> rng;
    std::optional<GuidanceCue> last_cue;
};

inline SessionState make_session(std::string session_id) {
    SessionState s;
    s.session_id = std::move(session_id);
    return s;
}

namespace detail {

inline void begin_trial(SessionState& s, const Start& start, const SessionCatalog& catalog, const SessionConfig& cfg) {
    auto p = catalog.paths.find(start.path);
    if (p == catalog.paths.end()) throw ProtocolError("unknown_path", "no path named '" + start.path + "'");
    auto e = catalog.environments.find(start.env);
    if (e == catalog.environments.end()) throw ProtocolError("unknown_env", "no environment named '" + start.env + "'");
    auto prof = catalog.profiles.find(start.perception);
    if (prof == catalog.profiles.end()) {
        throw ProtocolError("unknown_profile", "no perception profile named '" + start.perception + "'");
    }
    const Path& path = p->second;
    s.started = true;
    s.complete = false;
    s.start = start;
    s.mode = start.mode;
    s.path = path;
    s.env = e->second;
    s.profile = prof->second;
    s.pose = Pose{path.waypoints[0].x, path.waypoints[0].y, bearing_deg(path.waypoints[0], path.waypoints[1])};
    s.nav = NavigatorState{};
    s.scheduler = HapticScheduler(cfg.scheduler);
    s.tick = 0;
    s.trajectory.clear();
    s.scene.emplace(cfg.camera, cfg.perception, cfg.scene);
    s.follower.emplace(static_cast<std::int64_t>(std::llround(s.profile.reaction_latency_ms)));
    s.rng.emplace(start.seed);
    s.last_cue.reset();
}

inline std::optional<HapticPatternId> steer_motion(SteerAction a) {
    switch (a) {
        case SteerAction::Forward: return HapticPatternId::SlideFrontFast;
        case SteerAction::Left: return HapticPatternId::SlideLeftFast;
        case SteerAction::Right: return HapticPatternId::SlideRightFast;
        case SteerAction::Stop: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace detail

// One session tick. Client inputs apply in arrival order; the newest Steer drives this tick's
// motion in human mode. Output order per tick: PoseUpdate, WaypointReached, CueEvent(s),
// SceneUpdate, TrialComplete. Errors for rejected inputs come first and leave state unchanged.
inline std::vector<ServerMessage> session_tick(SessionState& s, const std::vector<ClientMessage>& inputs,
                                               const SessionCatalog& catalog, const SessionConfig& cfg) {
    std::vector<ServerMessage> out;
    std::optional<SteerAction> steer;
    for (const auto& in : inputs) {
        try {
            if (const auto* st = std::get_if<Start>(&in)) {
                detail::begin_trial(s, *st, catalog, cfg);
                steer.reset();
                out.push_back(SessionStarted{s.path, s.env, cfg.tolerance, s.mode, cfg.tick_hz});
            } else if (const auto* sv = std::get_if<Steer>(&in)) {
                if (!s.started) throw ProtocolError("not_started", "steer before start");
                if (s.complete) throw ProtocolError("trial_complete", "trial already complete; send reset or start");
                if (s.mode != SessionMode::HumanSteered) throw ProtocolError("scripted", "session is scripted");
                steer = sv->action;
            } else if (const auto* ss = std::get_if<SetSensitivity>(&in)) {
                s.sensitivity = ss->level;
            } else {
                if (!s.started) throw ProtocolError("not_started", "reset before start");
                detail::begin_trial(s, s.start, catalog, cfg);
                steer.reset();
                out.push_back(SessionStarted{s.path, s.env, cfg.tolerance, s.mode, cfg.tick_hz});
            }
        } catch (const ProtocolError& e) {
            out.push_back(Error{e.code(), e.what()});
        }
    }
    if (!s.started || s.complete) return out;

    const std::int64_t tick_ms = 1000 / cfg.tick_hz;
    const std::int64_t t = s.tick * tick_ms;
    const double dt_s = tick_ms / 1000.0;
    std::vector<Playback> started;

    // Motion over the previous interval, driven by the human or by the scripted perceiver.
    if (s.tick > 0) {
        std::optional<HapticPatternId> acting;
        if (s.mode == SessionMode::HumanSteered) {
            if (steer) acting = detail::steer_motion(*steer);
        } else {
            acting = s.follower->acting(t - tick_ms);
        }
        s.pose = sim::constrained_step(s.pose, acting, dt_s, cfg.agent, s.env, t / 1000.0);
    }
    s.trajectory.push_back({t / 1000.0, s.pose});

    for (const auto& p : s.scheduler.advance(t)) started.push_back(p);
    const GuidanceStep g = guidance_step(s.pose, s.path, s.nav, cfg.tolerance);
    s.nav = g.state;
    s.last_cue = g.cue;
    if (auto pattern = cue_pattern(g.cue)) {
        if (s.scheduler.submit(*pattern, t) == SubmitResult::Accepted) started.push_back(*s.scheduler.current());
    }

    const std::size_t seg = std::min(s.nav.waypoint_index, s.path.waypoints.size() - 1);
    const Vec2 a = s.path.waypoints[seg == 0 ? 0 : seg - 1];
    const Vec2 b = s.path.waypoints[seg == 0 ? 1 : seg];
    out.push_back(PoseUpdate{s.tick, t, s.pose, std::abs(cross_track_m(s.pose.position(), a, b)) <= cfg.tolerance.pos_tol_m});
    if (g.reached_index) out.push_back(WaypointReached{s.tick, *g.reached_index});
    for (const auto& p : started) {
        if (s.mode == SessionMode::Scripted) s.follower->begin(p, sim::sample_perceived(p.pattern, s.profile, *s.rng));
        // The cue that caused a pattern is recovered from the pattern itself.
        GuidanceCue cue = GuidanceCue::SlideFront;
        switch (p.pattern) {
            case HapticPatternId::SlideLeftFast: cue = GuidanceCue::SlideLeft; break;
            case HapticPatternId::SlideRightFast: cue = GuidanceCue::SlideRight; break;
            case HapticPatternId::TapFront: cue = GuidanceCue::TapFrontArrived; break;
            default: break;
        }
        out.push_back(CueEvent{s.tick, p.start_ms, cue, compile_pattern(p.pattern)});
    }
    if (s.tick % cfg.scene_every_ticks == 0) {
        s.scene->push(sim::synth_camera(s.env, s.pose, cfg.camera, cfg.rig, t / 1000.0, s.tick + 1));
        out.push_back(SceneUpdate{s.tick, s.scene->summary()});
    }
    const bool timed_out = t >= static_cast<std::int64_t>(std::llround(cfg.timeout_s * 1000.0));
    if (s.nav.finished || timed_out) {
        s.complete = true;
        out.push_back(TrialComplete{s.tick, s.nav.finished, compute_metrics(s.trajectory, s.path, cfg.tolerance)});
    }
    ++s.tick;
    return out;
}

}  // namespace hapticnav::gateway
