#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hapticnav/errors.hpp"
#include "hapticnav/haptics/kinematics.hpp"
#include "hapticnav/haptics/scheduler.hpp"
#include "hapticnav/navigator.hpp"
#include "hapticnav/perception.hpp"
#include "hapticnav/policy.hpp"
#include "hapticnav/scene.hpp"
#include "hapticnav/sim/agent.hpp"
#include "hapticnav/sim/camera.hpp"
#include "hapticnav/sim/environment.hpp"
#include "hapticnav/sim/trial.hpp"

// JSON mappings for every on-disk and on-wire type. Field names are part of the external
// interface; keep them stable.
namespace hapticnav {

using json = nlohmann::json;

namespace io {

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? fallback : it->template get<T>();
}

inline std::optional<double> optional_number(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<double>();
}

}  // namespace io

inline json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// --- perception -------------------------------------------------------------------------------

inline void to_json(json& j, const BBox& b) { j = json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

inline void from_json(const json& j, BBox& b) {
    if (!j.is_array() || j.size() != 4) throw InputError("bbox must be an array [x_min, y_min, x_max, y_max]");
    b = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline void to_json(json& j, const Detection& d) {
    j = json{{"label", d.label}, {"bbox", d.bbox}, {"confidence", d.confidence}};
    if (d.distance_hint_m) j["distance_m"] = *d.distance_hint_m;
}

inline void from_json(const json& j, Detection& d) {
    d.label = j.at("label").get<std::string>();
    d.bbox = j.at("bbox").get<BBox>();
    d.confidence = j.at("confidence").get<double>();
    d.distance_hint_m = io::optional_number(j, "distance_m");
}

inline void to_json(json& j, const DetectionFrame& f) {
    j = json{{"frame_id", f.frame_id},
             {"timestamp_ms", f.timestamp_ms},
             {"image_width_px", f.image_width_px},
             {"image_height_px", f.image_height_px},
             {"detections", f.detections}};
}

inline void from_json(const json& j, DetectionFrame& f) {
    f.frame_id = j.at("frame_id").get<std::int64_t>();
    f.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    f.image_width_px = j.at("image_width_px").get<int>();
    f.image_height_px = j.at("image_height_px").get<int>();
    f.detections = j.at("detections").get<std::vector<Detection>>();
}

inline void to_json(json& j, const CameraModel& c) {
    j = json{{"focal_length_px", c.focal_length_px}, {"class_height_priors_m", c.class_height_priors_m}};
}

inline void from_json(const json& j, CameraModel& c) {
    c.focal_length_px = j.at("focal_length_px").get<double>();
    c.class_height_priors_m = io::get_or(j, "class_height_priors_m", std::map<std::string, double>{});
    c.validate();
}

inline void to_json(json& j, const GridCell& c) { j = to_string(c); }
inline void from_json(const json& j, GridCell& c) { c = parse_cell(j.get<std::string>()); }

// --- scene ------------------------------------------------------------------------------------

inline void to_json(json& j, const ConsolidatedObject& o) {
    j = json{{"label", o.label},
             {"cell", o.cell},
             {"distance_m", optional_to_json(o.distance_m)},
             {"persistence_count", o.persistence_count},
             {"priority", o.priority},
             {"immediate_hazard", o.immediate_hazard}};
}

inline void from_json(const json& j, ConsolidatedObject& o) {
    o.label = j.at("label").get<std::string>();
    o.cell = j.at("cell").get<GridCell>();
    o.distance_m = io::optional_number(j, "distance_m");
    o.persistence_count = j.at("persistence_count").get<int>();
    o.priority = j.at("priority").get<double>();
    o.immediate_hazard = j.at("immediate_hazard").get<bool>();
}

inline void to_json(json& j, const SceneSummary& s) {
    j = json{{"objects", s.objects}, {"window_span", json::array({s.first_frame_id, s.last_frame_id})}};
}

inline void from_json(const json& j, SceneSummary& s) {
    s.objects = j.at("objects").get<std::vector<ConsolidatedObject>>();
    const auto& span = j.at("window_span");
    s.first_frame_id = span.at(0).get<std::int64_t>();
    s.last_frame_id = span.at(1).get<std::int64_t>();
}

inline void to_json(json& j, const SceneConfig& c) {
    j = json{{"window_capacity", c.window_capacity}, {"persistence_k", c.persistence_k},
             {"hazard_distance_m", c.hazard_distance_m}};
}

inline void from_json(const json& j, SceneConfig& c) {
    c.window_capacity = io::get_or<std::size_t>(j, "window_capacity", 5);
    c.persistence_k = io::get_or(j, "persistence_k", 3);
    c.hazard_distance_m = io::get_or(j, "hazard_distance_m", 1.0);
    c.validate();
}

inline void to_json(json& j, const PerceptionConfig& c) {
    j = json{{"min_confidence", c.min_confidence}, {"use_distance_hint", c.use_distance_hint}};
}

inline void from_json(const json& j, PerceptionConfig& c) {
    c.min_confidence = io::get_or(j, "min_confidence", 0.25);
    c.use_distance_hint = io::get_or(j, "use_distance_hint", true);
}

// --- policy -----------------------------------------------------------------------------------

inline void to_json(json& j, const PolicyConfig& c) {
    j = json{{"sensitivity", to_string(c.sensitivity)},
             {"llm_endpoint", c.llm_endpoint},
             {"llm_model", c.llm_model},
             {"timeout_ms", c.timeout_ms},
             {"fallback_enabled", c.fallback_enabled},
             {"api_key_env", c.api_key_env}};
}

inline void from_json(const json& j, PolicyConfig& c) {
    PolicyConfig d;
    c.sensitivity = parse_sensitivity(io::get_or(j, "sensitivity", std::string(to_string(d.sensitivity))));
    c.llm_endpoint = io::get_or(j, "llm_endpoint", d.llm_endpoint);
    c.llm_model = io::get_or(j, "llm_model", d.llm_model);
    c.timeout_ms = io::get_or(j, "timeout_ms", d.timeout_ms);
    c.fallback_enabled = io::get_or(j, "fallback_enabled", d.fallback_enabled);
    c.api_key_env = io::get_or(j, "api_key_env", d.api_key_env);
    c.validate();
}

inline json decision_log_entry(const SceneSummary& summary, const NavPrompt& prompt, const Decision& d) {
    json j{{"frame_span", json::array({summary.first_frame_id, summary.last_frame_id})},
           {"prompt", json{{"version", prompt_template::kVersion},
                           {"sensitivity", to_string(prompt.sensitivity)},
                           {"scene_text", prompt.scene_text}}},
           {"raw_response", d.raw_response ? json(*d.raw_response) : json(nullptr)},
           {"command", to_string(d.command)},
           {"source", to_string(d.source)},
           {"latency_ms", d.latency_ms}};
    if (d.fallback_reason) j["fallback_reason"] = *d.fallback_reason;
    return j;
}

// --- haptics ----------------------------------------------------------------------------------

inline void to_json(json& j, const Vec2& v) { j = json::array({v.x, v.y}); }

inline void from_json(const json& j, Vec2& v) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("point must be [x, y]");
    v = {j[0].get<double>(), j[1].get<double>()};
}

inline void to_json(json& j, const LinkageGeometry& g) {
    j = json{{"base_separation_mm", g.base_separation_mm},
             {"proximal_left_mm", g.proximal_left_mm},
             {"proximal_right_mm", g.proximal_right_mm},
             {"distal_left_mm", g.distal_left_mm},
             {"distal_right_mm", g.distal_right_mm},
             {"contact_origin", g.contact_origin},
             {"contact_direction", g.contact_direction},
             {"press_direction", g.press_direction},
             {"press_depth_mm", g.press_depth_mm},
             {"retract_mm", g.retract_mm},
             {"left_elbow", g.left_elbow},
             {"right_elbow", g.right_elbow},
             {"assembly_sign", g.assembly_sign},
             {"left_servo_zero_deg", g.left_servo_zero_deg},
             {"right_servo_zero_deg", g.right_servo_zero_deg},
             {"servo_min_deg", g.servo_min_deg},
             {"servo_max_deg", g.servo_max_deg}};
}

inline void from_json(const json& j, LinkageGeometry& g) {
    const LinkageGeometry d;
    g.base_separation_mm = io::get_or(j, "base_separation_mm", d.base_separation_mm);
    g.proximal_left_mm = io::get_or(j, "proximal_left_mm", d.proximal_left_mm);
    g.proximal_right_mm = io::get_or(j, "proximal_right_mm", d.proximal_right_mm);
    g.distal_left_mm = io::get_or(j, "distal_left_mm", d.distal_left_mm);
    g.distal_right_mm = io::get_or(j, "distal_right_mm", d.distal_right_mm);
    g.contact_origin = io::get_or(j, "contact_origin", d.contact_origin);
    g.contact_direction = io::get_or(j, "contact_direction", d.contact_direction);
    g.press_direction = io::get_or(j, "press_direction", d.press_direction);
    g.press_depth_mm = io::get_or(j, "press_depth_mm", d.press_depth_mm);
    g.retract_mm = io::get_or(j, "retract_mm", d.retract_mm);
    g.left_elbow = io::get_or(j, "left_elbow", d.left_elbow);
    g.right_elbow = io::get_or(j, "right_elbow", d.right_elbow);
    g.assembly_sign = io::get_or(j, "assembly_sign", d.assembly_sign);
    g.left_servo_zero_deg = io::get_or(j, "left_servo_zero_deg", d.left_servo_zero_deg);
    g.right_servo_zero_deg = io::get_or(j, "right_servo_zero_deg", d.right_servo_zero_deg);
    g.servo_min_deg = io::get_or(j, "servo_min_deg", d.servo_min_deg);
    g.servo_max_deg = io::get_or(j, "servo_max_deg", d.servo_max_deg);
}

inline void to_json(json& j, const Calibration& c) {
    j = json{{"pressure_gain", {{"left", c.pressure_gain_left}, {"right", c.pressure_gain_right}}},
             {"position_offset_mm", {{"left", c.position_offset_left_mm}, {"right", c.position_offset_right_mm}}}};
}

inline void from_json(const json& j, Calibration& c) {
    c = Calibration{};
    if (auto it = j.find("pressure_gain"); it != j.end()) {
        c.pressure_gain_left = io::get_or(*it, "left", 1.0);
        c.pressure_gain_right = io::get_or(*it, "right", 1.0);
    }
    if (auto it = j.find("position_offset_mm"); it != j.end()) {
        c.position_offset_left_mm = io::get_or(*it, "left", 0.0);
        c.position_offset_right_mm = io::get_or(*it, "right", 0.0);
    }
    c.validate();
}

inline void to_json(json& j, const ContactKeyframe& k) {
    j = json{{"t_ms", k.t_ms}, {"temple", to_string(k.temple)}, {"position_mm", k.position_mm}, {"pressure", k.pressure}};
}

inline void to_json(json& j, const PatternTrajectory& t) {
    j = json{{"pattern", to_string(t.pattern)}, {"duration_ms", t.duration_ms}, {"keyframes", t.keyframes}};
}

// --- navigator --------------------------------------------------------------------------------

inline void to_json(json& j, const Pose& p) { j = json{{"x_m", p.x_m}, {"y_m", p.y_m}, {"heading_deg", p.heading_deg}}; }

inline void from_json(const json& j, Pose& p) {
    p.x_m = j.at("x_m").get<double>();
    p.y_m = j.at("y_m").get<double>();
    p.heading_deg = normalize_deg(io::get_or(j, "heading_deg", 0.0));
}

inline void to_json(json& j, const Path& p) { j = json{{"name", p.name}, {"waypoints", p.waypoints}}; }

inline void from_json(const json& j, Path& p) {
    p.name = io::get_or(j, "name", std::string("path"));
    p.waypoints = j.at("waypoints").get<std::vector<Vec2>>();
    p.validate();
}

inline void to_json(json& j, const ToleranceConfig& t) {
    j = json{{"pos_tol_m", t.pos_tol_m}, {"heading_tol_deg", t.heading_tol_deg}, {"waypoint_radius_m", t.waypoint_radius_m}};
}

inline void from_json(const json& j, ToleranceConfig& t) {
    t.pos_tol_m = io::get_or(j, "pos_tol_m", 0.3);
    t.heading_tol_deg = io::get_or(j, "heading_tol_deg", 15.0);
    t.waypoint_radius_m = io::get_or(j, "waypoint_radius_m", 0.3);
    t.validate();
}

inline void to_json(json& j, const TrialMetrics& m) {
    j = json{{"completion_time_s", m.completion_time_s},
             {"pct_time_outside_tolerance", m.pct_time_outside_tolerance},
             {"exit_reenter_count", m.exit_reenter_count},
             {"waypoints_reached", m.waypoints_reached}};
}

inline void from_json(const json& j, TrialMetrics& m) {
    m.completion_time_s = j.at("completion_time_s").get<double>();
    m.pct_time_outside_tolerance = j.at("pct_time_outside_tolerance").get<double>();
    m.exit_reenter_count = j.at("exit_reenter_count").get<int>();
    m.waypoints_reached = j.at("waypoints_reached").get<int>();
}

inline void to_json(json& j, const SchedulerConfig& c) {
    j = json{{"rest_gap_ms", c.rest_gap_ms}, {"cue_budget_ms", c.cue_budget_ms}};
}

inline void from_json(const json& j, SchedulerConfig& c) {
    const SchedulerConfig d;
    c.rest_gap_ms = io::get_or(j, "rest_gap_ms", d.rest_gap_ms);
    c.cue_budget_ms = io::get_or(j, "cue_budget_ms", d.cue_budget_ms);
    if (c.rest_gap_ms < 0 || c.cue_budget_ms <= 0) throw ConfigError("scheduler gaps must be non-negative");
}

// --- sim --------------------------------------------------------------------------------------

namespace sim {

inline void to_json(json& j, const Environment& e) {
    json statics = json::array();
    for (const auto& o : e.static_obstacles) {
        statics.push_back({{"x", o.position.x}, {"y", o.position.y}, {"radius_m", o.radius_m}, {"label", o.label}});
    }
    json dynamics = json::array();
    for (const auto& o : e.dynamic_obstacles) {
        dynamics.push_back({{"label", o.label}, {"radius_m", o.radius_m}, {"speed_mps", o.speed_mps},
                            {"phase_m", o.phase_m}, {"loop", o.loop}});
    }
    j = json{{"name", e.name},
             {"room", {{"width_m", e.room.width_m}, {"depth_m", e.room.depth_m}}},
             {"static_obstacles", statics},
             {"dynamic_obstacles", dynamics}};
}

inline void from_json(const json& j, Environment& e) {
    e = Environment{};
    e.name = io::get_or(j, "name", std::string("environment"));
    if (auto it = j.find("room"); it != j.end()) {
        e.room.width_m = io::get_or(*it, "width_m", 6.0);
        e.room.depth_m = io::get_or(*it, "depth_m", 6.0);
    }
    for (const auto& o : io::get_or(j, "static_obstacles", json::array())) {
        e.static_obstacles.push_back({{o.at("x").get<double>(), o.at("y").get<double>()},
                                      o.at("radius_m").get<double>(),
                                      io::get_or(o, "label", std::string("obstacle"))});
    }
    for (const auto& o : io::get_or(j, "dynamic_obstacles", json::array())) {
        DynamicObstacle d;
        d.label = io::get_or(o, "label", std::string("obstacle"));
        d.radius_m = o.at("radius_m").get<double>();
        d.speed_mps = io::get_or(o, "speed_mps", 0.5);
        d.phase_m = io::get_or(o, "phase_m", 0.0);
        d.loop = o.at("loop").get<std::vector<Vec2>>();
        e.dynamic_obstacles.push_back(std::move(d));
    }
    e.validate();
}

inline void to_json(json& j, const CameraRig& r) {
    j = json{{"fov_deg", r.fov_deg},
             {"range_m", r.range_m},
             {"image_width_px", r.image_width_px},
             {"image_height_px", r.image_height_px},
             {"camera_height_m", r.camera_height_m},
             {"default_object_height_m", r.default_object_height_m},
             {"confidence", r.confidence}};
}

inline void from_json(const json& j, CameraRig& r) {
    const CameraRig d;
    r.fov_deg = io::get_or(j, "fov_deg", d.fov_deg);
    r.range_m = io::get_or(j, "range_m", d.range_m);
    r.image_width_px = io::get_or(j, "image_width_px", d.image_width_px);
    r.image_height_px = io::get_or(j, "image_height_px", d.image_height_px);
    r.camera_height_m = io::get_or(j, "camera_height_m", d.camera_height_m);
    r.default_object_height_m = io::get_or(j, "default_object_height_m", d.default_object_height_m);
    r.confidence = io::get_or(j, "confidence", d.confidence);
}

inline void to_json(json& j, const CueRecord& c) {
    j = json{{"t_ms", c.t_ms}, {"pattern", to_string(c.pattern)}, {"perceived", to_string(c.perceived)}};
}

inline void to_json(json& j, const GuidanceRecord& g) { j = json{{"t_ms", g.t_ms}, {"cue", to_string(g.cue)}}; }

inline void to_json(json& j, const ArrivalRecord& a) {
    j = json{{"t_ms", a.t_ms}, {"waypoint_index", a.waypoint_index}};
}

// Trajectory samples are written to the CSV companion, not here.
inline void to_json(json& j, const TrialResult& r) {
    j = json{{"path", r.path_name},
             {"environment", r.environment_name},
             {"perception", r.perception_name},
             {"seed", r.seed},
             {"completed", r.completed},
             {"metrics", r.metrics},
             {"arrivals", r.arrivals},
             {"cues", r.cues},
             {"guidance", r.guidance},
             {"samples", r.trajectory.size()}};
}

}  // namespace sim

}  // namespace hapticnav
