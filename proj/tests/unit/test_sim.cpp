#include <gtest/gtest.h>

#include <fstream>

#include "hapticnav/io/json.hpp"
#include "hapticnav/sim/agent.hpp"
#include "hapticnav/sim/camera.hpp"
#include "hapticnav/sim/perception_profile.hpp"
#include "hapticnav/sim/trial.hpp"
#include "support/test_support.hpp"

using namespace hapticnav;
using namespace hapticnav::sim;
using testing_support::data_dir;

namespace {

Path load_path(const std::string& name) { return io::read_json_file((data_dir() / "paths" / (name + ".json")).string()).get<Path>(); }

Environment load_env(const std::string& name) {
    return io::read_json_file((data_dir() / "envs" / (name + ".json")).string()).get<Environment>();
}

Environment room_with(std::vector<StaticObstacle> obs) {
    Environment e;
    e.name = "test";
    e.static_obstacles = std::move(obs);
    return e;
}

}  // namespace

// --- perception profile ---

TEST(PerceptionProfile, RawTableMatchesIndependentTranscription) {
    // data/confusion/table1_raw.csv is re-derived from the source table by a separate script
    const auto transcribed = load_confusion_csv((data_dir() / "confusion" / "table1_raw.csv").string());
    for (std::size_t r = 0; r < kPatternCount; ++r) {
        for (std::size_t c = 0; c < kPatternCount; ++c) EXPECT_DOUBLE_EQ(table_one_raw()[r][c], transcribed[r][c]);
    }
}

TEST(PerceptionProfile, HeadlineCells) {
    const auto& raw = table_one_raw();
    auto cell = [&](HapticPatternId a, HapticPatternId b) { return raw[index_of(a)][index_of(b)]; };
    EXPECT_DOUBLE_EQ(cell(HapticPatternId::TapFront, HapticPatternId::TapFront), 0.85);
    EXPECT_DOUBLE_EQ(cell(HapticPatternId::TapFront, HapticPatternId::TapCenter), 0.11);
    EXPECT_DOUBLE_EQ(cell(HapticPatternId::SlideBackSlow, HapticPatternId::SlideBackSlow), 0.95);
    EXPECT_DOUBLE_EQ(cell(HapticPatternId::TapRight, HapticPatternId::TapRight), 0.65);
}

TEST(PerceptionProfile, NormalizedRowsSumToOne) {
    const auto p = PerceptionProfile::table_one();
    EXPECT_NO_THROW(p.validate());
    for (const auto& row : p.confusion) {
        double s = 0;
        for (double v : row) s += v;
        EXPECT_NEAR(s, 1.0, 1e-9);
    }
    const auto bundled = load_confusion_csv((data_dir() / "confusion" / "table1_normalized.csv").string());
    for (std::size_t r = 0; r < kPatternCount; ++r) {
        for (std::size_t c = 0; c < kPatternCount; ++c) EXPECT_NEAR(p.confusion[r][c], bundled[r][c], 5e-7);
    }
}

TEST(PerceptionProfile, EmpiricalRowsMatchTable) {
    const auto p = PerceptionProfile::table_one();
    Rng rng(123);
    for (std::size_t r = 0; r < kPatternCount; ++r) {
        std::array<int, kPatternCount> counts{};
        for (int i = 0; i < 10000; ++i) ++counts[index_of(sample_perceived(kAllPatterns[r], p, rng))];
        for (std::size_t c = 0; c < kPatternCount; ++c) {
            // sampled against the normalized model; normalization stays within 0.02 of the raw cells
            EXPECT_NEAR(counts[c] / 10000.0, p.confusion[r][c], 0.02) << kPatternNames[r] << " -> " << kPatternNames[c];
            EXPECT_NEAR(p.confusion[r][c], table_one_raw()[r][c], 0.02);
        }
    }
}

TEST(PerceptionProfile, PerfectIsIdentity) {
    const auto p = PerceptionProfile::perfect();
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const auto id = kAllPatterns[i % kPatternCount];
        EXPECT_EQ(sample_perceived(id, p, rng), id);
    }
}

TEST(PerceptionProfile, CsvErrors) {
    std::istringstream empty("");
    EXPECT_THROW(parse_confusion_csv(empty), ConfigError);
    std::istringstream short_header("pattern,tap_front\n");
    EXPECT_THROW(parse_confusion_csv(short_header), ConfigError);
    PerceptionProfile bad = PerceptionProfile::perfect();
    bad.confusion[0][1] = 0.5;
    EXPECT_THROW(bad.validate(), ConfigError);
}

// --- agent ---

TEST(Agent, StepExamples) {
    const AgentModel m;
    const Pose p0{1.0, 1.0, 0.0};
    const Pose walked = step_agent(p0, HapticPatternId::SlideFrontFast, 0.1, m);
    EXPECT_NEAR(walked.x_m, 1.08, 1e-12);
    EXPECT_NEAR(walked.y_m, 1.0, 1e-12);
    EXPECT_NEAR(step_agent(p0, HapticPatternId::SlideLeftFast, 1.0, m).heading_deg, 45.0, 1e-12);
    EXPECT_NEAR(step_agent(p0, HapticPatternId::SlideRightSlow, 1.0, m).heading_deg, -45.0, 1e-12);
    EXPECT_EQ(step_agent(p0, HapticPatternId::TapCenter, 0.1, m), p0);
    EXPECT_EQ(step_agent(p0, std::nullopt, 0.1, m), p0);
    EXPECT_THROW(step_agent(p0, std::nullopt, 0.0, m), InputError);
}

TEST(Agent, FollowerWaitsForLatency) {
    CueFollower f(500);
    f.begin(Playback{HapticPatternId::SlideFrontFast, 1000, 2000, 2250}, HapticPatternId::SlideFrontFast);
    EXPECT_FALSE(f.acting(1400));
    EXPECT_EQ(f.acting(1500), HapticPatternId::SlideFrontFast);
    EXPECT_EQ(f.acting(1900), HapticPatternId::SlideFrontFast);
    EXPECT_FALSE(f.acting(2000));
}

TEST(Agent, PerceivedTapFreezes) {
    CueFollower f(300);
    f.begin(Playback{HapticPatternId::SlideFrontFast, 0, 1000, 1250}, HapticPatternId::TapFront);
    EXPECT_FALSE(f.acting(300));
    EXPECT_FALSE(f.acting(500));
    EXPECT_EQ(f.acting(600), HapticPatternId::TapFront);  // a pause pattern: no locomotion either way
}

// --- camera ---

TEST(Camera, HandProjection) {
    // chair of radius 0.25 centred 1.25 m dead ahead: surface range 1.0 m
    const auto env = room_with({{{2.25, 3.0}, 0.25, "chair"}});
    const auto f = synth_camera(env, {1.0, 3.0, 0.0}, CameraModel::defaults(), CameraRig{}, 0.0, 1);
    ASSERT_EQ(f.detections.size(), 1u);
    const auto& b = f.detections[0].bbox;
    // half-angle asin(0.2) = 11.537 deg, 500 * tan / 640 = 0.15951
    EXPECT_NEAR(b.x_min, 0.5 - 500.0 * 0.2 / std::sqrt(0.96) / 640.0, 1e-9);
    EXPECT_NEAR(b.x_max, 0.5 + 500.0 * 0.2 / std::sqrt(0.96) / 640.0, 1e-9);
    EXPECT_NEAR(b.x_min, 0.3405, 1e-4);
    // floor contact row clipped to the image edge; height 500 * 0.9 / 480 = 0.9375
    EXPECT_DOUBLE_EQ(b.y_max, 1.0);
    EXPECT_NEAR(b.y_min, 0.0625, 1e-12);
    EXPECT_DOUBLE_EQ(*f.detections[0].distance_hint_m, 1.0);
    EXPECT_EQ(assign_cell(b), kBottomCenter);
    EXPECT_EQ(f.image_width_px, 640);
}

TEST(Camera, BehindAndOutOfRangeCulled) {
    const auto env = room_with({{{0.5, 3.0}, 0.25, "chair"}, {{5.9, 3.0}, 0.05, "box"}});
    CameraRig shortsighted;
    shortsighted.range_m = 4.0;  // the box surface is 4.85 m away
    const auto far = synth_camera(env, {1.0, 3.0, 0.0}, CameraModel::defaults(), shortsighted, 0.0, 1);
    EXPECT_TRUE(far.detections.empty());
    CameraRig wide;
    wide.range_m = 10.0;
    EXPECT_EQ(synth_camera(env, {1.0, 3.0, 0.0}, CameraModel::defaults(), wide, 0.0, 1).detections.size(), 1u);
}

TEST(Camera, EmptyRoom) {
    EXPECT_TRUE(synth_camera(Environment{}, {3, 3, 45}, CameraModel::defaults(), CameraRig{}, 0.0, 1).detections.empty());
}

TEST(Camera, FullyOccludedObstacleHidden) {
    const auto env = room_with({{{2.0, 3.0}, 0.4, "box"}, {{4.0, 3.0}, 0.2, "chair"}});
    std::vector<std::size_t> sources;
    const auto f = synth_camera(env, {1.0, 3.0, 0.0}, CameraModel::defaults(), CameraRig{}, 0.0, 1, &sources);
    ASSERT_EQ(f.detections.size(), 1u);
    EXPECT_EQ(f.detections[0].label, "box");
    EXPECT_EQ(sources, std::vector<std::size_t>{0});
}

TEST(Camera, CloserNeverShrinks) {
    for (double az : {-25.0, -10.0, 0.0, 12.0, 28.0}) {
        double prev = 0.0;
        for (double d = 4.8; d > 0.4; d -= 0.05) {
            const Vec2 c{1.0 + d * std::cos(deg_to_rad(az)), 3.0 + d * std::sin(deg_to_rad(az))};
            const auto f = synth_camera(room_with({{c, 0.2, "person"}}), {1.0, 3.0, 0.0}, CameraModel::defaults(),
                                        CameraRig{}, 0.0, 1);
            if (f.detections.empty()) continue;
            const double h = f.detections[0].bbox.height();
            EXPECT_GE(h, prev - 1e-12) << az << " " << d;
            prev = h;
        }
        EXPECT_GT(prev, 0.0);
    }
}

TEST(Camera, AzimuthMapsToColumns) {
    const Pose pose{1.0, 3.0, 0.0};
    auto column_at = [&](double az) {
        const Vec2 c{1.0 + 2.0 * std::cos(deg_to_rad(az)), 3.0 + 2.0 * std::sin(deg_to_rad(az))};
        const auto f = synth_camera(room_with({{c, 0.1, "box"}}), pose, CameraModel::defaults(), CameraRig{}, 0.0, 1);
        return assign_cell(f.detections.at(0).bbox).column;
    };
    EXPECT_EQ(column_at(20.0), GridColumn::Left);  // counter-clockwise is image left
    EXPECT_EQ(column_at(0.0), GridColumn::Center);
    EXPECT_EQ(column_at(-20.0), GridColumn::Right);
}

TEST(Environment, DynamicLoopPosition) {
    DynamicObstacle d;
    d.loop = {{1, 1}, {3, 1}};
    d.speed_mps = 1.0;
    EXPECT_NEAR(d.position_at(1.0).x, 2.0, 1e-12);
    EXPECT_NEAR(d.position_at(3.0).x, 2.0, 1e-12);  // on the way back
    EXPECT_NEAR(d.position_at(4.0).x, 1.0, 1e-12);
}

TEST(Environment, ValidationErrors) {
    auto e = room_with({{{7.0, 3.0}, 0.2, "box"}});
    EXPECT_THROW(e.validate(), ConfigError);
    e = room_with({{{3.0, 3.0}, 0.0, "box"}});
    EXPECT_THROW(e.validate(), ConfigError);
}

// --- trials ---

TEST(Trial, Path1PerfectGolden) {
    const auto r = run_navigation_trial(load_path("path1"), load_env("empty"), AgentModel{}, TrialConfig{}, 1);
    EXPECT_TRUE(r.completed);
    EXPECT_EQ(r.metrics.waypoints_reached, 6);
    EXPECT_EQ(r.arrivals.size(), 6u);
    EXPECT_LT(r.metrics.pct_time_outside_tolerance, 2.0);
    EXPECT_NEAR(r.metrics.completion_time_s, 65.3, 1e-9);
    for (const auto& c : r.cues) EXPECT_EQ(c.pattern, c.perceived);
}

TEST(Trial, Path2PerfectCompletes) {
    const auto r = run_navigation_trial(load_path("path2"), load_env("empty"), AgentModel{}, TrialConfig{}, 1);
    EXPECT_TRUE(r.completed);
    EXPECT_EQ(r.metrics.waypoints_reached, 5);
    EXPECT_LT(r.metrics.pct_time_outside_tolerance, 2.0);
}

TEST(Trial, SameSeedSameResult) {
    AgentModel a;
    a.perception = PerceptionProfile::table_one();
    const auto p = load_path("path2");
    const auto e = load_env("furnished");
    const auto r1 = run_navigation_trial(p, e, a, TrialConfig{}, 99);
    const auto r2 = run_navigation_trial(p, e, a, TrialConfig{}, 99);
    EXPECT_EQ(r1, r2);
    EXPECT_EQ(json(r1).dump(), json(r2).dump());
}

TEST(Trial, CueSpacingRespectsScheduler) {
    AgentModel a;
    a.perception = PerceptionProfile::table_one();
    const auto r = run_navigation_trial(load_path("path1"), load_env("empty"), a, TrialConfig{}, 5);
    for (std::size_t i = 1; i < r.cues.size(); ++i) {
        EXPECT_GE(r.cues[i].t_ms - r.cues[i - 1].t_ms, pattern_duration_ms(r.cues[i - 1].pattern) + 250);
    }
}

TEST(Trial, ZeroWalkSpeedTimesOut) {
    AgentModel a;
    a.walk_speed_mps = 0.0;
    TrialConfig cfg;
    cfg.timeout_s = 30.0;
    const auto r = run_navigation_trial(load_path("path1"), load_env("empty"), a, cfg, 1);
    EXPECT_FALSE(r.completed);
    EXPECT_EQ(r.metrics.waypoints_reached, 1);
    EXPECT_GT(r.trajectory.back().t_s, 30.0);
}

TEST(Trial, BlockedWaypointIncomplete) {
    const auto r = run_navigation_trial(load_path("path1"), load_env("blocked_waypoint"), AgentModel{}, TrialConfig{}, 1);
    EXPECT_FALSE(r.completed);
    EXPECT_LT(r.metrics.waypoints_reached, 6);
}

TEST(Trial, InvalidInputs) {
    EXPECT_THROW(run_navigation_trial(Path{"p", {{1, 1}}}, Environment{}, AgentModel{}, TrialConfig{}, 1), ConfigError);
    TrialConfig cfg;
    cfg.tick_hz = 7;
    EXPECT_THROW(run_navigation_trial(load_path("path1"), Environment{}, AgentModel{}, cfg, 1), ConfigError);
}

TEST(Rng, DerivedSeedsDiffer) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(7, i));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(Rng, UniformRange) {
    Rng r(5);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(r.below(7), 7u);
    }
}
