#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hapticnav/gateway/server.hpp"
#include "hapticnav/gateway/session.hpp"
#include "hapticnav/haptics/render.hpp"
#include "hapticnav/haptics/wire.hpp"
#include "hapticnav/io/csv.hpp"
#include "hapticnav/io/detection_log.hpp"
#include "hapticnav/io/json.hpp"
#include "hapticnav/io/svg.hpp"
#include "hapticnav/llm/http_client.hpp"
#include "hapticnav/llm/transcript_client.hpp"
#include "hapticnav/pipeline.hpp"
#include "hapticnav/sim/scenario.hpp"
#include "hapticnav/sim/trial.hpp"

// Command implementations behind tools/hapticnav.cpp. Each command takes a plain options struct
// so tests can drive it in-process; argument parsing stays in the tool.
namespace hapticnav::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kUsageError = 2 };

// Bad flags or combinations the user can fix; maps to exit code 2 like ConfigError.
class UsageError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

inline std::string default_data_dir() {
    if (const char* env = std::getenv("HAPTICNAV_DATA_DIR")) return env;
    return HAPTICNAV_DATA_DIR;
}

// A spec is either an existing file or a bare name looked up as <data>/<subdir>/<name><ext>.
inline std::string resolve_data_file(const std::string& spec, const std::string& data_dir, const std::string& subdir,
                                     const std::string& ext = ".json") {
    if (fs::is_regular_file(spec)) return spec;
    const fs::path named = fs::path(data_dir) / subdir / (spec + ext);
    if (fs::is_regular_file(named)) return named.string();
    throw ConfigError("cannot find '" + spec + "' (not a file, and no " + named.string() + ")");
}

// --- configs ----------------------------------------------------------------------------------

struct PipelineConfig {
    CameraModel camera = CameraModel::defaults();
    PerceptionConfig perception;
    SceneConfig scene;
};

inline PipelineConfig parse_pipeline_config(const json& j) {
    PipelineConfig c;
    if (j.contains("camera")) c.camera = j.at("camera").get<CameraModel>();
    if (j.contains("perception")) c.perception = j.at("perception").get<PerceptionConfig>();
    if (j.contains("scene")) c.scene = j.at("scene").get<SceneConfig>();
    return c;
}

inline PipelineConfig load_pipeline_config(const std::optional<std::string>& path) {
    return path ? parse_pipeline_config(io::read_json_file(*path)) : PipelineConfig{};
}

inline PolicyConfig load_policy_config(const std::optional<std::string>& path) {
    return path ? io::read_json_file(*path).get<PolicyConfig>() : PolicyConfig{};
}

// "perfect", "table_one" (alias "table1"), a CSV path, or a CSV name under <data>/confusion.
inline sim::PerceptionProfile resolve_profile(const std::string& spec, double latency_ms, const std::string& data_dir) {
    if (spec == "perfect") return sim::PerceptionProfile::perfect(latency_ms);
    if (spec == "table_one" || spec == "table1") return sim::PerceptionProfile::table_one(latency_ms);
    const std::string path = resolve_data_file(spec, data_dir, "confusion", ".csv");
    sim::PerceptionProfile p{fs::path(path).stem().string(), sim::normalized(sim::load_confusion_csv(path)), latency_ms};
    p.validate();
    return p;
}

struct AgentFile {
    sim::AgentModel agent;
    sim::TrialConfig trial;
    std::string perception = "perfect";
};

// {walk_speed_mps, turn_rate_dps, body_radius_m, reaction_latency_ms, perception,
//  trial: {tick_hz, timeout_s, scheduler, tolerance}}
inline AgentFile parse_agent_file(const json& j, const std::string& data_dir) {
    AgentFile f;
    const sim::AgentModel d;
    f.agent.walk_speed_mps = io::get_or(j, "walk_speed_mps", d.walk_speed_mps);
    f.agent.turn_rate_dps = io::get_or(j, "turn_rate_dps", d.turn_rate_dps);
    f.agent.body_radius_m = io::get_or(j, "body_radius_m", d.body_radius_m);
    f.perception = io::get_or(j, "perception", f.perception);
    const double latency = io::get_or(j, "reaction_latency_ms", d.perception.reaction_latency_ms);
    f.agent.perception = resolve_profile(f.perception, latency, data_dir);
    if (auto it = j.find("trial"); it != j.end()) {
        f.trial.tick_hz = io::get_or(*it, "tick_hz", f.trial.tick_hz);
        f.trial.timeout_s = io::get_or(*it, "timeout_s", f.trial.timeout_s);
        if (it->contains("scheduler")) f.trial.scheduler = it->at("scheduler").get<SchedulerConfig>();
        if (it->contains("tolerance")) f.trial.tolerance = it->at("tolerance").get<ToleranceConfig>();
    }
    f.agent.validate();
    f.trial.validate();
    return f;
}

inline gateway::SessionConfig parse_session_config(const json& j) {
    gateway::SessionConfig c;
    c.tick_hz = io::get_or(j, "tick_hz", c.tick_hz);
    c.scene_every_ticks = io::get_or(j, "scene_every_ticks", c.scene_every_ticks);
    c.timeout_s = io::get_or(j, "timeout_s", c.timeout_s);
    if (auto it = j.find("agent"); it != j.end()) {
        c.agent.walk_speed_mps = io::get_or(*it, "walk_speed_mps", c.agent.walk_speed_mps);
        c.agent.turn_rate_dps = io::get_or(*it, "turn_rate_dps", c.agent.turn_rate_dps);
        c.agent.body_radius_m = io::get_or(*it, "body_radius_m", c.agent.body_radius_m);
        c.agent.perception.reaction_latency_ms =
            io::get_or(*it, "reaction_latency_ms", c.agent.perception.reaction_latency_ms);
    }
    if (j.contains("tolerance")) c.tolerance = j.at("tolerance").get<ToleranceConfig>();
    if (j.contains("scheduler")) c.scheduler = j.at("scheduler").get<SchedulerConfig>();
    if (j.contains("camera")) c.camera = j.at("camera").get<CameraModel>();
    if (j.contains("rig")) c.rig = j.at("rig").get<sim::CameraRig>();
    if (j.contains("perception")) c.perception = j.at("perception").get<PerceptionConfig>();
    if (j.contains("scene")) c.scene = j.at("scene").get<SceneConfig>();
    c.validate();
    return c;
}

inline gateway::GatewayConfig parse_gateway_config(const json& j) {
    gateway::GatewayConfig c;
    c.host = io::get_or(j, "host", c.host);
    c.port = io::get_or(j, "port", c.port);
    c.threads = io::get_or(j, "threads", c.threads);
    if (j.contains("session")) c.session = parse_session_config(j.at("session"));
    c.validate();
    return c;
}

// --- manifest ---------------------------------------------------------------------------------

// Written next to every output. No timestamps, so reruns with the same flags are byte-identical.
struct RunManifest {
    std::string command;
    std::vector<std::string> command_line;
    std::map<std::string, std::string> config_paths;
    std::optional<std::uint64_t> seed;
    std::string output_dir;
    std::string tool_version = HAPTICNAV_VERSION;
    json extra = json::object();
};

inline void to_json(json& j, const RunManifest& m) {
    j = json{{"command", m.command},
             {"command_line", m.command_line},
             {"config_paths", m.config_paths},
             {"seed", m.seed ? json(*m.seed) : json(nullptr)},
             {"output_dir", m.output_dir},
             {"tool_version", m.tool_version}};
    for (const auto& [k, v] : m.extra.items()) j[k] = v;
}

inline void from_json(const json& j, RunManifest& m) {
    m.command = j.at("command").get<std::string>();
    m.command_line = j.at("command_line").get<std::vector<std::string>>();
    m.config_paths = j.at("config_paths").get<std::map<std::string, std::string>>();
    m.seed = j.at("seed").is_null() ? std::nullopt : std::optional<std::uint64_t>(j.at("seed").get<std::uint64_t>());
    m.output_dir = j.at("output_dir").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
}

inline void write_json(const fs::path& path, const json& j) { io::write_text_file(path.string(), j.dump(2) + "\n"); }

inline void prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir.string() + "'");
}

// --- language model clients -------------------------------------------------------------------

// mode: none|fallback, transcript, http|llm. The credential is read from the environment only.
inline std::unique_ptr<LlmClient> make_llm_client(const std::string& mode, const PolicyConfig& policy,
                                                  const std::optional<std::string>& transcript) {
    if (mode == "none" || mode == "fallback") return nullptr;
    if (mode == "transcript") {
        if (!transcript) throw UsageError("transcript replay needs --transcript <file>");
        return std::make_unique<TranscriptLlmClient>(TranscriptLlmClient::load(*transcript));
    }
    if (mode == "http" || mode == "llm") {
        std::string key = api_key_from_env(policy);
        if (key.empty()) {
            throw UsageError("the live model route needs a credential: export " + policy.api_key_env +
                             "=<api key> (keys are never taken as flags), or run offline with "
                             "--policy fallback or --policy transcript");
        }
        return std::make_unique<HttpLlmClient>(policy.llm_endpoint, policy.llm_model, std::move(key));
    }
    throw UsageError("unknown policy '" + mode + "'");
}

// --- replay -----------------------------------------------------------------------------------

struct ReplayOptions {
    std::string log;
    std::optional<std::string> pipeline_config;
    std::optional<std::string> policy_config;
    std::string llm = "none";
    std::optional<std::string> transcript;
    std::string out_dir = "out/replay";
    bool strict = false;
};

struct ReplayResult {
    json decisions = json::array();
    std::vector<io::LogIssue> issues;
    std::size_t frames = 0;
};

// Perception, scene and policy over a recorded log. One decision per frame once the window is
// full, covering the window that ends at that frame.
inline ReplayResult replay_log(const io::DetectionLog& log, const PipelineConfig& pc, const PolicyConfig& policy,
                               LlmClient* client) {
    ReplayResult r;
    r.issues = log.issues;
    r.frames = log.frames.size();
    ScenePipeline pipeline(pc.camera, pc.perception, pc.scene);
    for (const auto& frame : log.frames) {
        pipeline.push(frame);
        if (!pipeline.window_full()) continue;
        const SceneSummary summary = pipeline.summary();
        const NavPrompt prompt = build_prompt(summary, policy.sensitivity);
        const Decision d = decide(summary, policy, client);
        r.decisions.push_back(decision_log_entry(summary, prompt, d));
    }
    return r;
}

inline int run_replay(const ReplayOptions& o, std::ostream& out, std::ostream& err) {
    const PipelineConfig pc = load_pipeline_config(o.pipeline_config);
    const PolicyConfig policy = load_policy_config(o.policy_config);
    auto client = make_llm_client(o.llm, policy, o.transcript);
    const io::DetectionLog log = io::load_detection_log(o.log, o.strict);
    for (const auto& issue : log.issues) err << o.log << ":" << issue.line << ": skipped: " << issue.message << "\n";

    const ReplayResult r = replay_log(log, pc, policy, client.get());
    const fs::path dir(o.out_dir);
    prepare_dir(dir);
    {
        std::string lines;
        for (const auto& d : r.decisions) lines += d.dump() + "\n";
        io::write_text_file((dir / "decisions.ndjson").string(), lines);
    }

    RunManifest m;
    m.command = "replay";
    m.command_line = {"hapticnav", "replay", o.log, "--llm", o.llm, "--out", o.out_dir};
    if (o.pipeline_config) {
        m.config_paths["pipeline"] = *o.pipeline_config;
        m.command_line.insert(m.command_line.end(), {"--config", *o.pipeline_config});
    }
    if (o.policy_config) {
        m.config_paths["policy"] = *o.policy_config;
        m.command_line.insert(m.command_line.end(), {"--policy-config", *o.policy_config});
    }
    if (o.transcript) {
        m.config_paths["transcript"] = *o.transcript;
        m.command_line.insert(m.command_line.end(), {"--transcript", *o.transcript});
    }
    if (o.strict) m.command_line.push_back("--strict");
    m.config_paths["log"] = o.log;
    m.output_dir = o.out_dir;
    m.extra["frames"] = r.frames;
    m.extra["decisions"] = r.decisions.size();
    m.extra["skipped_lines"] = r.issues.size();
    write_json(dir / "manifest.json", m);

    out << r.frames << " frames, " << r.decisions.size() << " decisions, " << r.issues.size() << " skipped lines -> "
        << (dir / "decisions.ndjson").string() << "\n";
    return kOk;
}

// --- compile-pattern --------------------------------------------------------------------------

struct CompileOptions {
    std::string pattern;
    std::string emit = "csv";
    std::optional<std::string> geometry;
    std::optional<std::string> calibration;
    int tick_hz = 50;
    std::optional<std::string> out;  // stdout when empty
};

inline std::string compile_pattern_text(const CompileOptions& o) {
    HapticPatternId id;
    try {
        id = parse_pattern(o.pattern);
    } catch (const InputError& e) {
        throw UsageError(e.what());
    }
    if (o.tick_hz <= 0 || 1000 % o.tick_hz != 0) throw UsageError("--tick-hz must divide 1000");
    const PatternTrajectory traj = compile_pattern(id);
    if (o.emit == "csv") return io::trajectory_csv(traj, o.tick_hz);
    if (o.emit != "wire") throw UsageError("--emit must be csv or wire");
    const LinkageGeometry geom = o.geometry ? io::read_json_file(*o.geometry).get<LinkageGeometry>() : LinkageGeometry{};
    const Calibration cal = o.calibration ? io::read_json_file(*o.calibration).get<Calibration>() : Calibration{};
    validate_geometry(geom);
    return wire::encode_stream(render(traj, geom, cal, o.tick_hz), wire::Limits::from_geometry(geom));
}

inline int run_compile_pattern(const CompileOptions& o, std::ostream& out, std::ostream& err) {
    const std::string text = compile_pattern_text(o);
    const HapticPatternId id = parse_pattern(o.pattern);
    if (!o.out) {
        out << text;
        return kOk;
    }
    const fs::path file(*o.out);
    if (file.has_parent_path()) prepare_dir(file.parent_path());
    io::write_text_file(file.string(), text);

    RunManifest m;
    m.command = "compile-pattern";
    m.command_line = {"hapticnav", "compile-pattern", o.pattern, "--emit", o.emit, "--tick-hz", std::to_string(o.tick_hz),
                      "--out", *o.out};
    if (o.geometry) {
        m.config_paths["geometry"] = *o.geometry;
        m.command_line.insert(m.command_line.end(), {"--geometry", *o.geometry});
    }
    if (o.calibration) {
        m.config_paths["calibration"] = *o.calibration;
        m.command_line.insert(m.command_line.end(), {"--calibration", *o.calibration});
    }
    m.output_dir = file.has_parent_path() ? file.parent_path().string() : ".";
    m.extra["duration_ms"] = pattern_duration_ms(id);
    write_json(file.string() + ".manifest.json", m);
    err << to_string(id) << ": " << pattern_duration_ms(id) << " ms -> " << file.string() << "\n";
    return kOk;
}

// --- sim-nav ----------------------------------------------------------------------------------

struct SimNavOptions {
    std::string path = "path1";
    std::string env = "empty";
    std::optional<std::string> agent_config;
    std::optional<std::string> perception;  // overrides the agent file
    std::uint64_t seed = 1;
    int trials = 1;
    int jobs = 0;  // 0: hardware concurrency
    std::string out_dir = "out/sim-nav";
    std::string data_dir = default_data_dir();
    std::size_t plot_limit = 10;
};

struct SimNavRun {
    Path path;
    sim::Environment env;
    AgentFile agent;
    std::vector<sim::TrialResult> results;
};

// Trial i runs with derive_seed(seed, i), so results do not depend on the job count.
inline std::vector<sim::TrialResult> run_trials(const Path& path, const sim::Environment& env,
                                                const sim::AgentModel& agent, const sim::TrialConfig& cfg,
                                                std::uint64_t seed, int trials, int jobs) {
    if (trials < 0) throw UsageError("--trials must be non-negative");
    std::vector<sim::TrialResult> results(static_cast<std::size_t>(trials));
    const int workers = std::max(1, std::min(trials, jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency())));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto work = [&] {
        for (int i; (i = next.fetch_add(1)) < trials;) {
            try {
                results[static_cast<std::size_t>(i)] =
                    sim::run_navigation_trial(path, env, agent, cfg, sim::derive_seed(seed, static_cast<std::uint64_t>(i)));
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

inline json aggregate_json(const SimNavRun& run, std::uint64_t seed) {
    const auto& rs = run.results;
    const double n = static_cast<double>(rs.size());
    int completed = 0;
    double time_sum = 0.0, outside_sum = 0.0, exits_sum = 0.0, wp_sum = 0.0, outside_max = 0.0;
    json per_trial = json::array();
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto& r = rs[i];
        if (r.completed) {
            ++completed;
            time_sum += r.metrics.completion_time_s;
        }
        outside_sum += r.metrics.pct_time_outside_tolerance;
        outside_max = std::max(outside_max, r.metrics.pct_time_outside_tolerance);
        exits_sum += r.metrics.exit_reenter_count;
        wp_sum += r.metrics.waypoints_reached;
        per_trial.push_back({{"index", i}, {"seed", r.seed}, {"completed", r.completed}, {"metrics", r.metrics}});
    }
    auto mean = [&](double sum) { return rs.empty() ? json(nullptr) : json(sum / n); };
    return json{{"path", run.path.name},
                {"environment", run.env.name},
                {"perception", run.agent.agent.perception.name},
                {"seed", seed},
                {"waypoint_count", run.path.waypoints.size()},
                {"trials", rs.size()},
                {"completed", completed},
                {"completion_rate", mean(completed)},
                {"mean_completion_time_s", completed ? json(time_sum / completed) : json(nullptr)},
                {"mean_pct_time_outside_tolerance", mean(outside_sum)},
                {"max_pct_time_outside_tolerance", outside_max},
                {"mean_exit_reenter_count", mean(exits_sum)},
                {"mean_waypoints_reached", mean(wp_sum)},
                {"per_trial", per_trial}};
}

inline SimNavRun simulate(const SimNavOptions& o) {
    SimNavRun run;
    run.path = io::read_json_file(resolve_data_file(o.path, o.data_dir, "paths")).get<Path>();
    run.path.validate();
    run.env = io::read_json_file(resolve_data_file(o.env, o.data_dir, "envs")).get<sim::Environment>();
    run.agent = o.agent_config ? parse_agent_file(io::read_json_file(*o.agent_config), o.data_dir)
                               : parse_agent_file(json::object(), o.data_dir);
    if (o.perception) {
        run.agent.perception = *o.perception;
        run.agent.agent.perception =
            resolve_profile(*o.perception, run.agent.agent.perception.reaction_latency_ms, o.data_dir);
    }
    run.results = run_trials(run.path, run.env, run.agent.agent, run.agent.trial, o.seed, o.trials, o.jobs);
    return run;
}

inline int run_sim_nav(const SimNavOptions& o, std::ostream& out, std::ostream&) {
    const SimNavRun run = simulate(o);
    const fs::path dir(o.out_dir);
    prepare_dir(dir / "trials");
    std::vector<std::vector<TimedPose>> plotted;
    for (std::size_t i = 0; i < run.results.size(); ++i) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "trial_%03zu", i);
        write_json(dir / "trials" / (std::string(stem) + ".json"), run.results[i]);
        io::write_text_file((dir / "trials" / (std::string(stem) + ".csv")).string(),
                            io::pose_log_csv(run.results[i].trajectory));
        if (plotted.size() < o.plot_limit) plotted.push_back(run.results[i].trajectory);
    }
    const json agg = aggregate_json(run, o.seed);
    write_json(dir / "aggregate.json", agg);
    io::write_text_file((dir / "plot.svg").string(),
                        io::trajectory_svg(run.path, run.env, run.agent.trial.tolerance, plotted));

    RunManifest m;
    m.command = "sim-nav";
    m.command_line = {"hapticnav", "sim-nav", "--path", o.path, "--env", o.env, "--seed", std::to_string(o.seed),
                      "--trials", std::to_string(o.trials), "--out", o.out_dir};
    if (o.agent_config) {
        m.config_paths["agent"] = *o.agent_config;
        m.command_line.insert(m.command_line.end(), {"--agent", *o.agent_config});
    }
    if (o.perception) m.command_line.insert(m.command_line.end(), {"--perception", *o.perception});
    m.config_paths["path"] = resolve_data_file(o.path, o.data_dir, "paths");
    m.config_paths["environment"] = resolve_data_file(o.env, o.data_dir, "envs");
    m.seed = o.seed;
    m.output_dir = o.out_dir;
    write_json(dir / "manifest.json", m);

    out << run.path.name << " / " << run.env.name << " / " << run.agent.agent.perception.name << ": "
        << agg.at("completed").get<int>() << "/" << run.results.size() << " completed";
    if (!run.results.empty()) {
        out << ", mean outside " << io::fmt("%.2f", agg.at("mean_pct_time_outside_tolerance").get<double>())
            << "%, mean exits " << io::fmt("%.2f", agg.at("mean_exit_reenter_count").get<double>());
    }
    out << " -> " << dir.string() << "\n";
    return kOk;
}

// --- scenario ---------------------------------------------------------------------------------

struct ScenarioOptions {
    std::string kind = "all";
    std::string policy = "fallback";
    int trials = 20;
    std::uint64_t seed = 42;
    std::optional<std::string> labels;
    std::optional<std::string> transcript;
    std::optional<std::string> policy_config;
    std::string out_dir = "out/scenario";
    std::string data_dir = default_data_dir();
};

inline std::vector<sim::ScenarioKind> scenario_kinds(const std::string& spec) {
    if (spec == "all") return {sim::kAllScenarioKinds.begin(), sim::kAllScenarioKinds.end()};
    try {
        return {sim::parse_scenario_kind(spec)};
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

inline json scenes_json(sim::ScenarioKind kind, int trials, std::uint64_t seed, const sim::ScenarioSettings& s) {
    json scenes = json::array();
    for (int i = 0; i < trials; ++i) scenes.push_back(sim::generate_scene(kind, seed, i, s));
    return json{{"kind", sim::to_string(kind)}, {"seed", seed}, {"settings", s}, {"scenes", scenes}};
}

inline int run_scenario(const ScenarioOptions& o, std::ostream& out, std::ostream&) {
    const auto kinds = scenario_kinds(o.kind);
    if (o.trials < 0) throw UsageError("--trials must be non-negative");
    const PolicyConfig policy = load_policy_config(o.policy_config);
    std::optional<std::string> transcript = o.transcript;
    if (o.policy == "transcript" && !transcript) {
        transcript = (fs::path(o.data_dir) / "transcripts" / "scenarios.json").string();
    }
    if (o.policy != "fallback" && o.policy != "llm" && o.policy != "transcript") {
        throw UsageError("--policy must be fallback, llm or transcript");
    }
    auto client = make_llm_client(o.policy, policy, transcript);
    std::optional<std::string> labels_path = o.labels;
    const fs::path bundled = fs::path(o.data_dir) / "scenarios" / "labels.json";
    if (!labels_path && fs::is_regular_file(bundled)) labels_path = bundled.string();
    const sim::LabelSet labels = labels_path ? sim::load_labels(*labels_path) : sim::LabelSet{};

    const fs::path dir(o.out_dir);
    prepare_dir(dir);
    const sim::ScenarioSettings settings;
    json summary = json::object();
    for (auto kind : kinds) {
        const auto report = sim::run_decision_scenario(kind, o.trials, o.seed, policy, client.get(), labels, settings);
        const std::string name(sim::to_string(kind));
        write_json(dir / ("report_" + name + ".json"), sim::report_to_json(report));
        write_json(dir / ("scenes_" + name + ".json"), scenes_json(kind, o.trials, o.seed, settings));
        const auto acc = report.accuracy();
        summary[name] = acc ? json(*acc) : json(nullptr);
        out << name << ": ";
        if (acc) {
            out << "accuracy " << io::fmt("%.3f", *acc) << " (" << report.correct << "/" << report.labeled << " labeled)";
        } else {
            out << "no labels for these scenes";
        }
        out << ", decisions llm " << report.llm_decisions << " fallback " << report.fallback_decisions;
        if (o.policy == "llm") {
            out << "; reference " << io::fmt("%.3f", sim::reference_accuracy(kind)) << " (informational)";
        }
        out << "\n";
    }

    RunManifest m;
    m.command = "scenario";
    m.command_line = {"hapticnav", "scenario", o.kind, "--policy", o.policy, "--trials", std::to_string(o.trials),
                      "--seed", std::to_string(o.seed), "--out", o.out_dir};
    if (labels_path) {
        m.config_paths["labels"] = *labels_path;
        m.command_line.insert(m.command_line.end(), {"--labels", *labels_path});
    }
    if (client && transcript && o.policy == "transcript") {
        m.config_paths["transcript"] = *transcript;
        m.command_line.insert(m.command_line.end(), {"--transcript", *transcript});
    }
    if (o.policy_config) {
        m.config_paths["policy"] = *o.policy_config;
        m.command_line.insert(m.command_line.end(), {"--policy-config", *o.policy_config});
    }
    m.seed = o.seed;
    m.output_dir = o.out_dir;
    m.extra["accuracy"] = summary;
    write_json(dir / "manifest.json", m);
    return kOk;
}

// --- serve ------------------------------------------------------------------------------------

struct ServeOptions {
    std::optional<std::string> host;
    std::optional<int> port;
    std::optional<std::string> config;
    std::string data_dir = default_data_dir();
};

// Blocks in wait_for_shutdown between start and stop.
inline int run_serve(const ServeOptions& o, std::ostream& out, std::ostream&,
                     const std::function<void()>& wait_for_shutdown) {
    gateway::GatewayConfig cfg = o.config ? parse_gateway_config(io::read_json_file(*o.config)) : gateway::GatewayConfig{};
    if (o.host) cfg.host = *o.host;
    if (o.port) {
        if (*o.port < 0 || *o.port > 65535) throw UsageError("--port must be in [0, 65535]");
        cfg.port = static_cast<unsigned short>(*o.port);
    }
    gateway::GatewayServer server(cfg, gateway::SessionCatalog::load(o.data_dir));
    const unsigned short port = server.start();
    out << "listening on " << cfg.host << ":" << port << " (websocket /session, status /healthz)" << std::endl;
    wait_for_shutdown();
    const std::size_t open = server.active_sessions();
    server.stop();
    out << "stopped, closed " << open << " session(s)" << std::endl;
    return kOk;
}

// --- error mapping ----------------------------------------------------------------------------

// Runs a command and turns exceptions into exit codes: config and usage problems are 2,
// everything else that escapes is a runtime failure.
inline int guarded(const std::function<int()>& command, std::ostream& err) {
    try {
        return command();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const json::exception& e) {
        err << "error: bad configuration value: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
}

}  // namespace hapticnav::cli
