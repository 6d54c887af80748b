#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hapticnav/errors.hpp"
#include "hapticnav/io/json.hpp"
#include "hapticnav/pipeline.hpp"
#include "hapticnav/policy.hpp"
#include "hapticnav/sim/camera.hpp"
#include "hapticnav/sim/environment.hpp"
#include "hapticnav/sim/rng.hpp"

namespace hapticnav::sim {

enum class ScenarioKind { OpenSpace, StaticObstacles, DynamicObstacles };

inline constexpr std::array<ScenarioKind, 3> kAllScenarioKinds{ScenarioKind::OpenSpace, ScenarioKind::StaticObstacles,
                                                               ScenarioKind::DynamicObstacles};

inline std::string_view to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::OpenSpace: return "open";
        case ScenarioKind::StaticObstacles: return "static";
        case ScenarioKind::DynamicObstacles: return "dynamic";
    }
    return "open";
}

inline ScenarioKind parse_scenario_kind(std::string_view text) {
    if (text == "open" || text == "open_space") return ScenarioKind::OpenSpace;
    if (text == "static" || text == "static_obstacles") return ScenarioKind::StaticObstacles;
    if (text == "dynamic" || text == "dynamic_obstacles") return ScenarioKind::DynamicObstacles;
    throw InputError("unknown scenario kind '" + std::string(text) + "' (expected open, static or dynamic)");
}

// Live-model accuracies reported for the three scenario kinds; informational only.
inline double reference_accuracy(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::OpenSpace: return 0.918;
        case ScenarioKind::StaticObstacles: return 0.8461;
        case ScenarioKind::DynamicObstacles: return 0.815;
    }
    return 0.0;
}

struct ScenarioSettings {
    int frame_count = 5;
    int frame_hz = 5;
    double dropout_probability = 0.5;
    CameraModel camera = CameraModel::defaults();
    CameraRig rig;
    PerceptionConfig perception;
    SceneConfig scene;
};

// One obstacle's detection removed from one frame.
struct DropoutEvent {
    std::size_t obstacle = 0;
    int frame = 0;

    bool operator==(const DropoutEvent&) const = default;
};

struct ScenarioScene {
    std::string scene_id;
    ScenarioKind kind = ScenarioKind::OpenSpace;
    Pose pose;
    double t0_s = 0.0;
    Environment env;
    std::vector<DropoutEvent> dropouts;
};

inline std::string make_scene_id(ScenarioKind kind, std::uint64_t suite_seed, int index) {
    return std::string(to_string(kind)) + "-" + std::to_string(suite_seed) + "-" + std::to_string(index);
}

// Clean camera frames 1..frame_count at frame_hz from t0, with the obstacle behind each detection.
struct SceneFrames {
    std::vector<DetectionFrame> frames;
    std::vector<std::vector<std::size_t>> sources;
};

inline SceneFrames synth_scene(const ScenarioScene& scene, const ScenarioSettings& s) {
    SceneFrames out;
    for (int i = 0; i < s.frame_count; ++i) {
        const double t = scene.t0_s + static_cast<double>(i) / s.frame_hz;
        std::vector<std::size_t> sources;
        out.frames.push_back(synth_camera(scene.env, scene.pose, s.camera, s.rig, t, i + 1, &sources));
        out.sources.push_back(std::move(sources));
    }
    return out;
}

inline std::vector<DetectionFrame> apply_dropouts(const SceneFrames& clean, const std::vector<DropoutEvent>& dropouts) {
    std::vector<DetectionFrame> frames;
    for (std::size_t i = 0; i < clean.frames.size(); ++i) {
        DetectionFrame f = clean.frames[i];
        f.detections.clear();
        for (std::size_t d = 0; d < clean.frames[i].detections.size(); ++d) {
            const bool dropped = std::any_of(dropouts.begin(), dropouts.end(), [&](const DropoutEvent& e) {
                return e.frame == static_cast<int>(i) && e.obstacle == clean.sources[i][d];
            });
            if (!dropped) f.detections.push_back(clean.frames[i].detections[d]);
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

inline std::vector<DetectionFrame> scene_frames(const ScenarioScene& scene, const ScenarioSettings& s,
                                                const std::vector<DropoutEvent>& dropouts) {
    return apply_dropouts(synth_scene(scene, s), dropouts);
}

inline SceneSummary summarize_frames(const std::vector<DetectionFrame>& frames, const ScenarioSettings& s) {
    ScenePipeline pipe(s.camera, s.perception, s.scene);
    for (const auto& f : frames) pipe.push(f);
    return pipe.summary();
}

inline SceneSummary scene_summary(const ScenarioScene& scene, const ScenarioSettings& s) {
    return summarize_frames(scene_frames(scene, s, scene.dropouts), s);
}

namespace detail {

inline constexpr double kCellMargin = 0.02;
inline constexpr double kDistanceMargin = 0.1;
inline constexpr double kCostMargin = 0.1;

// Centroids hugging a grid boundary make the cell a coin flip for any independent checker.
inline bool frame_clear_of_boundaries(const DetectionFrame& f) {
    for (const auto& d : f.detections) {
        const double cx = (d.bbox.x_min + d.bbox.x_max) / 2.0;
        const double cy = (d.bbox.y_min + d.bbox.y_max) / 2.0;
        if (std::abs(cx - 1.0 / 3.0) < kCellMargin || std::abs(cx - 2.0 / 3.0) < kCellMargin) return false;
        const double dy = std::abs(cy - 0.5);
        if (dy > 0.0 && dy < kCellMargin) return false;
    }
    return true;
}

inline bool summary_clear_of_thresholds(const SceneSummary& s, double hazard_dist) {
    for (const auto& o : s.objects) {
        if (o.cell == kBottomCenter && o.distance_m && std::abs(*o.distance_m - hazard_dist) < kDistanceMargin) {
            return false;
        }
    }
    if (!s.has_immediate_hazard()) return true;
    const double l = side_cost(s, GridColumn::Left);
    const double r = side_cost(s, GridColumn::Right);
    if (std::abs(l - kBlockedSideCost) < kCostMargin || std::abs(r - kBlockedSideCost) < kCostMargin) return false;
    if (l < kBlockedSideCost || r < kBlockedSideCost) {
        if (std::abs(l - r) < kCostMargin) return false;
    }
    return true;
}

// Every pattern of "each seen obstacle loses at most one frame" must give the same command,
// with all geometric and cost quantities away from their thresholds.
inline bool robust_under_dropout(const ScenarioScene& scene, const ScenarioSettings& s) {
    const SceneFrames clean = synth_scene(scene, s);
    for (const auto& f : clean.frames) {
        if (!frame_clear_of_boundaries(f)) return false;
    }
    std::set<std::size_t> seen_set;
    for (const auto& src : clean.sources) seen_set.insert(src.begin(), src.end());
    const std::vector<std::size_t> seen(seen_set.begin(), seen_set.end());
    if (seen.size() > 5) return false;

    const int options = s.frame_count + 1;
    std::size_t patterns = 1;
    for (std::size_t i = 0; i < seen.size(); ++i) patterns *= static_cast<std::size_t>(options);
    std::optional<NavCommand> expected;
    for (std::size_t code = 0; code < patterns; ++code) {
        std::vector<DropoutEvent> drops;
        std::size_t c = code;
        for (std::size_t obstacle : seen) {
            const int choice = static_cast<int>(c % static_cast<std::size_t>(options));
            c /= static_cast<std::size_t>(options);
            if (choice > 0) drops.push_back({obstacle, choice - 1});
        }
        const SceneSummary summary = summarize_frames(apply_dropouts(clean, drops), s);
        if (!summary_clear_of_thresholds(summary, s.scene.hazard_distance_m)) return false;
        const NavCommand cmd = fallback_policy(summary);
        if (expected && *expected != cmd) return false;
        expected = cmd;
    }
    return true;
}

inline const std::array<std::string, 4>& obstacle_labels() {
    static const std::array<std::string, 4> labels{"chair", "box", "table", "trash can"};
    return labels;
}

// Obstacle centre for a given azimuth off the heading (CCW positive) and surface range.
inline Vec2 place(const Pose& pose, double azimuth_deg, double surface_range_m, double radius_m) {
    const double a = deg_to_rad(pose.heading_deg + azimuth_deg);
    const double d = surface_range_m + radius_m;
    return {pose.x_m + d * std::cos(a), pose.y_m + d * std::sin(a)};
}

class SceneBuilder {
public:
    SceneBuilder(Rng& rng, ScenarioScene& scene) : rng_(rng), scene_(scene) {}

    bool add_static(double az_lo, double az_hi, double r_lo, double r_hi) {
        for (int attempt = 0; attempt < 50; ++attempt) {
            const double radius = rng_.uniform(0.2, 0.3);
            const Vec2 c = place(scene_.pose, rng_.uniform(az_lo, az_hi), rng_.uniform(r_lo, r_hi), radius);
            const std::string& label = obstacle_labels()[rng_.below(obstacle_labels().size())];
            if (!fits(c, radius)) continue;
            scene_.env.static_obstacles.push_back({c, radius, label});
            return true;
        }
        return false;
    }

    // Chair shuttling between two points, starting somewhere along its first leg.
    bool add_dynamic(double az_a_lo, double az_a_hi, double r_a_lo, double r_a_hi, double phase_hi) {
        for (int attempt = 0; attempt < 20; ++attempt) {
            DynamicObstacle d;
            d.label = "chair";
            d.radius_m = rng_.uniform(0.2, 0.3);
            const Vec2 a = place(scene_.pose, rng_.uniform(az_a_lo, az_a_hi), rng_.uniform(r_a_lo, r_a_hi), d.radius_m);
            const Vec2 b = place(scene_.pose, rng_.uniform(-40.0, 40.0), rng_.uniform(0.6, 3.0), d.radius_m);
            d.speed_mps = rng_.uniform(0.2, 0.6);
            d.loop = {a, b};
            d.phase_m = rng_.uniform(0.0, phase_hi) * d.loop_length();
            if (distance(a, b) < 0.5 || !fits(a, d.radius_m) || !fits(b, d.radius_m)) continue;
            scene_.env.dynamic_obstacles.push_back(std::move(d));
            return true;
        }
        return false;
    }

private:
    bool fits(Vec2 c, double radius) const {
        if (!scene_.env.room.contains(c, radius)) return false;
        for (const auto& o : scene_.env.static_obstacles) {
            if (distance(c, o.position) < o.radius_m + radius + 0.05) return false;
        }
        for (const auto& o : scene_.env.dynamic_obstacles) {
            for (const auto& p : o.loop) {
                if (distance(c, p) < o.radius_m + radius + 0.05) return false;
            }
        }
        return true;
    }

    Rng& rng_;
    ScenarioScene& scene_;
};

inline void build_candidate(ScenarioKind kind, Rng& rng, ScenarioScene& scene) {
    scene.env = Environment{};
    scene.env.name = scene.scene_id;
    scene.pose = Pose{rng.uniform(1.5, 4.5), rng.uniform(1.5, 4.5), normalize_deg(rng.uniform(-180.0, 180.0))};
    scene.t0_s = 0.0;
    SceneBuilder b(rng, scene);
    switch (kind) {
        case ScenarioKind::OpenSpace:
            // Nothing in view; sometimes clutter behind the user.
            if (rng.bernoulli(0.5)) b.add_static(110.0, 250.0, 0.8, 2.5);
            break;
        case ScenarioKind::StaticObstacles:
            if (rng.bernoulli(0.3)) {
                const int n = 1 + static_cast<int>(rng.below(3));
                for (int i = 0; i < n; ++i) b.add_static(-28.0, 28.0, 1.5, 4.0);
            } else {
                if (rng.bernoulli(0.25)) {
                    // Hemmed in: close obstacles on both flanks, a hazard further ahead between them.
                    b.add_static(-3.0, 3.0, 0.7, 0.85);
                    b.add_static(23.0, 29.0, 0.38, 0.46);
                    b.add_static(-29.0, -23.0, 0.38, 0.46);
                    break;
                }
                b.add_static(-3.0, 3.0, 0.35, 0.8);
                const auto left = rng.below(3);
                const auto right = rng.below(3);
                for (std::uint64_t i = 0; i < left; ++i) b.add_static(16.0, 28.0, 0.45, 3.0);
                for (std::uint64_t i = 0; i < right; ++i) b.add_static(-28.0, -16.0, 0.45, 3.0);
            }
            break;
        case ScenarioKind::DynamicObstacles: {
            if (rng.bernoulli(0.6)) {
                b.add_dynamic(-3.0, 3.0, 0.35, 0.75, 0.1);
            } else {
                b.add_dynamic(-40.0, 40.0, 1.2, 3.0, 1.0);
            }
            const auto extra = rng.below(3);
            for (std::uint64_t i = 0; i < extra; ++i) b.add_dynamic(-40.0, 40.0, 0.45, 3.0, 1.0);
            if (rng.bernoulli(0.3)) b.add_static(-28.0, 28.0, 0.45, 3.0);
            break;
        }
    }
}

}  // namespace detail

// Deterministic in (kind, suite_seed, index). Candidates whose command could flip under the
// dropout model, or that sit near a grid, range or cost threshold, are redrawn.
inline ScenarioScene generate_scene(ScenarioKind kind, std::uint64_t suite_seed, int index,
                                    const ScenarioSettings& s = {}) {
    Rng rng(derive_seed(derive_seed(suite_seed, static_cast<std::uint64_t>(kind)), static_cast<std::uint64_t>(index)));
    ScenarioScene scene;
    scene.scene_id = make_scene_id(kind, suite_seed, index);
    scene.kind = kind;
    for (int attempt = 0; attempt < 2000; ++attempt) {
        detail::build_candidate(kind, rng, scene);
        try {
            scene.env.validate();
        } catch (const ConfigError&) {
            continue;
        }
        if (!detail::robust_under_dropout(scene, s)) continue;
        const std::size_t n = scene.env.static_obstacles.size() + scene.env.dynamic_obstacles.size();
        scene.dropouts.clear();
        for (std::size_t o = 0; o < n; ++o) {
            if (rng.bernoulli(s.dropout_probability)) {
                scene.dropouts.push_back({o, static_cast<int>(rng.below(static_cast<std::uint64_t>(s.frame_count)))});
            }
        }
        return scene;
    }
    throw InputError("could not generate a robust scene for " + scene.scene_id);
}

struct ScenarioLabel {
    std::string scene_id;
    NavCommand expected = NavCommand::Forward;
    std::string rationale;
};

using LabelSet = std::map<std::string, ScenarioLabel>;

struct ScenarioTrialRecord {
    std::string scene_id;
    SceneSummary summary;
    NavPrompt prompt;
    Decision decision;
    std::optional<NavCommand> expected;

    bool correct() const { return expected && *expected == decision.command; }
};

struct ScenarioReport {
    ScenarioKind kind = ScenarioKind::OpenSpace;
    std::uint64_t seed = 0;
    std::string policy;
    std::vector<ScenarioTrialRecord> trials;
    int labeled = 0;
    int correct = 0;
    int llm_decisions = 0;
    int fallback_decisions = 0;

    std::optional<double> accuracy() const {
        if (labeled == 0) return std::nullopt;
        return static_cast<double>(correct) / labeled;
    }
};

// Scenes are keyed to the client by scene_id so replaying clients pick the matching response.
inline ScenarioReport run_decision_scenario(ScenarioKind kind, int n_trials, std::uint64_t seed,
                                            const PolicyConfig& policy, LlmClient* client, const LabelSet& labels,
                                            const ScenarioSettings& s = {}) {
    if (n_trials < 0) throw ConfigError("trial count must be non-negative");
    ScenarioReport report;
    report.kind = kind;
    report.seed = seed;
    report.policy = client ? client->name() : "fallback";
    for (int i = 0; i < n_trials; ++i) {
        const ScenarioScene scene = generate_scene(kind, seed, i, s);
        ScenarioTrialRecord rec;
        rec.scene_id = scene.scene_id;
        rec.summary = scene_summary(scene, s);
        rec.prompt = build_prompt(rec.summary, policy.sensitivity);
        if (client) client->set_request_key(scene.scene_id);
        rec.decision = decide(rec.summary, policy, client);
        if (auto it = labels.find(scene.scene_id); it != labels.end()) {
            rec.expected = it->second.expected;
            ++report.labeled;
            if (rec.correct()) ++report.correct;
        }
        (rec.decision.source == DecisionSource::Llm ? report.llm_decisions : report.fallback_decisions)++;
        report.trials.push_back(std::move(rec));
    }
    return report;
}

// --- serialization ----------------------------------------------------------------------------

inline void to_json(json& j, const ScenarioScene& s) {
    json drops = json::array();
    for (const auto& d : s.dropouts) drops.push_back({{"obstacle", d.obstacle}, {"frame", d.frame}});
    j = json{{"scene_id", s.scene_id}, {"kind", to_string(s.kind)}, {"pose", s.pose},
             {"t0_s", s.t0_s},         {"environment", s.env},      {"dropouts", drops}};
}

inline void from_json(const json& j, ScenarioScene& s) {
    s.scene_id = j.at("scene_id").get<std::string>();
    s.kind = parse_scenario_kind(j.at("kind").get<std::string>());
    s.pose = j.at("pose").get<Pose>();
    s.t0_s = j.at("t0_s").get<double>();
    s.env = j.at("environment").get<Environment>();
    s.dropouts.clear();
    for (const auto& d : j.at("dropouts")) s.dropouts.push_back({d.at("obstacle").get<std::size_t>(), d.at("frame").get<int>()});
}

inline void to_json(json& j, const ScenarioSettings& s) {
    j = json{{"frame_count", s.frame_count},
             {"frame_hz", s.frame_hz},
             {"dropout_probability", s.dropout_probability},
             {"camera", s.camera},
             {"rig", s.rig},
             {"perception", s.perception},
             {"scene", s.scene}};
}

inline LabelSet parse_labels(const json& j) {
    LabelSet out;
    const json& list = j.is_object() ? j.at("labels") : j;
    for (const auto& e : list) {
        ScenarioLabel l;
        l.scene_id = e.at("scene_id").get<std::string>();
        l.expected = parse_nav_command_name(e.at("expected_command").get<std::string>());
        l.rationale = io::get_or(e, "rationale", std::string());
        out[l.scene_id] = std::move(l);
    }
    return out;
}

inline LabelSet load_labels(const std::string& path) { return parse_labels(io::read_json_file(path)); }

inline json report_to_json(const ScenarioReport& r) {
    json trials = json::array();
    for (const auto& t : r.trials) {
        json e{{"scene_id", t.scene_id},
               {"summary", t.summary},
               {"scene_text", t.prompt.scene_text},
               {"command", to_string(t.decision.command)},
               {"source", to_string(t.decision.source)},
               {"latency_ms", t.decision.latency_ms},
               {"raw_response", t.decision.raw_response ? json(*t.decision.raw_response) : json(nullptr)},
               {"expected_command", t.expected ? json(to_string(*t.expected)) : json(nullptr)},
               {"correct", t.expected ? json(t.correct()) : json(nullptr)}};
        if (t.decision.fallback_reason) e["fallback_reason"] = *t.decision.fallback_reason;
        trials.push_back(std::move(e));
    }
    const auto acc = r.accuracy();
    return json{{"kind", to_string(r.kind)},
                {"seed", r.seed},
                {"policy", r.policy},
                {"n_trials", r.trials.size()},
                {"labeled", r.labeled},
                {"correct", r.correct},
                {"accuracy", acc ? json(*acc) : json(nullptr)},
                {"decisions_by_source", {{"llm", r.llm_decisions}, {"fallback", r.fallback_decisions}}},
                {"reference_accuracy", reference_accuracy(r.kind)},
                {"trials", trials}};
}

}  // namespace hapticnav::sim
