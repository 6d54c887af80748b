#include <gtest/gtest.h>

#include <thread>

#include <boost/asio/connect.hpp>
#include <httplib.h>

#include "hapticnav/gateway/server.hpp"
#include "support/test_support.hpp"

using namespace hapticnav;
using namespace hapticnav::gateway;
using testing_support::data_dir;

namespace {

SessionCatalog test_catalog() {
    auto c = SessionCatalog::load(data_dir());
    c.paths["short"] = Path{"short", {{1.0, 1.0}, {2.5, 1.0}}};
    return c;
}

template <typename T>
std::vector<T> only(const std::vector<ServerMessage>& msgs) {
    std::vector<T> out;
    for (const auto& m : msgs) {
        if (const auto* v = std::get_if<T>(&m)) out.push_back(*v);
    }
    return out;
}

struct Harness {
    SessionCatalog catalog = test_catalog();
    SessionConfig cfg;
    SessionState s = make_session("s1");

    std::vector<ServerMessage> tick(std::vector<ClientMessage> in = {}) { return session_tick(s, in, catalog, cfg); }
    std::vector<ServerMessage> start(const std::string& path = "path1", SessionMode mode = SessionMode::HumanSteered) {
        Start st;
        st.path = path;
        st.mode = mode;
        return tick({st});
    }
};

}  // namespace

// --- protocol ---------------------------------------------------------------------------------

TEST(Protocol, ParsesClientMessages) {
    const auto m = parse_client_message(
        R"({"type": "start", "path": "path2", "env": "furnished", "perception": "table_one", "mode": "scripted", "seed": 9})");
    const auto& st = std::get<Start>(m);
    EXPECT_EQ(st.path, "path2");
    EXPECT_EQ(st.env, "furnished");
    EXPECT_EQ(st.mode, SessionMode::Scripted);
    EXPECT_EQ(st.seed, 9u);
    EXPECT_EQ(std::get<Steer>(parse_client_message(R"({"type":"steer","action":"left"})")).action, SteerAction::Left);
    EXPECT_EQ(std::get<SetSensitivity>(parse_client_message(R"({"type":"set_sensitivity","level":"high"})")).level,
              Sensitivity::High);
    EXPECT_TRUE(std::holds_alternative<Reset>(parse_client_message(R"({"type":"reset"})")));
}

TEST(Protocol, ClientMessagesRoundTrip) {
    for (const std::string text : {R"({"type":"steer","action":"forward"})", R"({"type":"reset"})",
                                   R"({"type":"set_sensitivity","level":"low"})"}) {
        EXPECT_EQ(to_json_message(parse_client_message(text)), json::parse(text));
    }
}

TEST(Protocol, ErrorCodes) {
    auto code = [](const std::string& text) {
        try {
            parse_client_message(text);
        } catch (const ProtocolError& e) {
            return e.code();
        }
        return std::string("none");
    };
    EXPECT_EQ(code("{nope"), "bad_json");
    EXPECT_EQ(code("[1,2]"), "bad_message");
    EXPECT_EQ(code(R"({"type":"dance"})"), "unknown_type");
    EXPECT_EQ(code(R"({"type":"steer","action":"jump"})"), "bad_message");
    EXPECT_EQ(code(R"({"type":"steer"})"), "bad_message");
    EXPECT_EQ(code(R"({"type":"start","mode":"remote"})"), "bad_message");
}

TEST(Protocol, ServerMessagesCarryTypeAndSession) {
    const auto j = to_json_message(ServerMessage{WaypointReached{12, 2}}, "s7");
    EXPECT_EQ(j.at("type"), "waypoint_reached");
    EXPECT_EQ(j.at("session_id"), "s7");
    EXPECT_EQ(j.at("index"), 2);
    EXPECT_EQ(to_json_message(ServerMessage{Error{"x", "y"}}, "s1").at("code"), "x");
}

// --- session ticks ----------------------------------------------------------------------------

TEST(SessionTick, SteerBeforeStartIsRejected) {
    Harness h;
    const auto out = h.tick({Steer{SteerAction::Forward}});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(std::get<Error>(out[0]).code, "not_started");
    EXPECT_FALSE(h.s.started);
    EXPECT_EQ(std::get<Error>(h.tick({Reset{}})[0]).code, "not_started");
}

TEST(SessionTick, UnknownNamesAreRejected) {
    Harness h;
    Start st;
    st.path = "nowhere";
    EXPECT_EQ(std::get<Error>(h.tick({st})[0]).code, "unknown_path");
    st = Start{};
    st.env = "mars";
    EXPECT_EQ(std::get<Error>(h.tick({st})[0]).code, "unknown_env");
    st = Start{};
    st.perception = "psychic";
    EXPECT_EQ(std::get<Error>(h.tick({st})[0]).code, "unknown_profile");
    EXPECT_FALSE(h.s.started);
}

TEST(SessionTick, StartEmitsSessionStartedThenTickZero) {
    Harness h;
    const auto out = h.start();
    ASSERT_GE(out.size(), 3u);
    EXPECT_TRUE(std::holds_alternative<SessionStarted>(out[0]));
    const auto& pose = std::get<PoseUpdate>(out[1]);
    EXPECT_EQ(pose.tick, 0);
    EXPECT_EQ(pose.pose.x_m, 1.0);
    // standing on waypoint 0 counts as reaching it
    EXPECT_EQ(only<WaypointReached>(out).at(0).index, 0u);
    EXPECT_EQ(only<CueEvent>(out).at(0).cue, GuidanceCue::TapFrontArrived);
}

TEST(SessionTick, ForwardSteerAdvancesPose) {
    Harness h;
    h.start();
    double x = 1.0;
    for (int i = 1; i <= 5; ++i) {
        const auto pose = only<PoseUpdate>(h.tick({Steer{SteerAction::Forward}})).at(0);
        EXPECT_EQ(pose.tick, i);
        EXPECT_EQ(pose.t_ms, 50 * i);
        EXPECT_GT(pose.pose.x_m, x);
        x = pose.pose.x_m;
        EXPECT_TRUE(pose.inside_band);
    }
    // no steer means no motion in human mode
    EXPECT_EQ(only<PoseUpdate>(h.tick()).at(0).pose.x_m, x);
}

TEST(SessionTick, TurningAwayCuesTheOtherSide) {
    Harness h;
    h.start();
    bool saw_right = false;
    for (int i = 0; i < 60 && !saw_right; ++i) {
        const auto out = h.tick({Steer{SteerAction::Left}});
        for (const auto& c : only<CueEvent>(out)) {
            if (c.cue != GuidanceCue::SlideRight) continue;
            saw_right = true;
            const double err = normalize_deg(bearing_deg(h.s.pose.position(), h.s.path.waypoints[1]) - h.s.pose.heading_deg);
            EXPECT_LT(err, -15.0);
            EXPECT_EQ(c.trajectory.pattern, HapticPatternId::SlideRightFast);
        }
    }
    EXPECT_TRUE(saw_right);
}

TEST(SessionTick, ArrivalOrderingAndCompletion) {
    Harness h;
    h.start("short");
    bool reached = false;
    for (int i = 0; i < 200 && !h.s.complete; ++i) {
        const auto out = h.tick({Steer{SteerAction::Forward}});
        // per-tick order: pose, waypoint, cues, scene, completion
        std::vector<std::size_t> kinds;
        for (const auto& m : out) kinds.push_back(m.index());
        EXPECT_TRUE(std::is_sorted(kinds.begin(), kinds.end()));
        ASSERT_TRUE(std::holds_alternative<PoseUpdate>(out.at(0)));
        for (const auto& w : only<WaypointReached>(out)) {
            EXPECT_EQ(w.index, 1u);
            reached = true;
        }
        for (const auto& done : only<TrialComplete>(out)) {
            EXPECT_TRUE(done.completed);
            EXPECT_EQ(done.metrics.waypoints_reached, 2);
            EXPECT_DOUBLE_EQ(done.metrics.pct_time_outside_tolerance, 0.0);
        }
    }
    EXPECT_TRUE(reached);
    ASSERT_TRUE(h.s.complete);
    const auto after = h.tick({Steer{SteerAction::Forward}});
    ASSERT_EQ(after.size(), 1u);
    EXPECT_EQ(std::get<Error>(after[0]).code, "trial_complete");
}

TEST(SessionTick, ResetRestartsTheTrial) {
    Harness h;
    h.start();
    for (int i = 0; i < 10; ++i) h.tick({Steer{SteerAction::Forward}});
    const auto out = h.tick({Reset{}});
    EXPECT_TRUE(std::holds_alternative<SessionStarted>(out.at(0)));
    EXPECT_EQ(std::get<PoseUpdate>(out.at(1)).tick, 0);
    EXPECT_EQ(std::get<PoseUpdate>(out.at(1)).pose.x_m, 1.0);
}

TEST(SessionTick, ScriptedSessionRejectsSteerAndFinishes) {
    Harness h;
    h.start("path1", SessionMode::Scripted);
    EXPECT_EQ(only<Error>(h.tick({Steer{SteerAction::Left}})).at(0).code, "scripted");
    std::optional<TrialComplete> done;
    std::int64_t last_start = -1, last_duration = 0;
    while (!h.s.complete && h.s.tick < 20 * 200) {
        const auto out = h.tick();
        for (const auto& c : only<CueEvent>(out)) {
            // patterns never overlap
            if (last_start >= 0) EXPECT_GE(c.t_ms, last_start + last_duration);
            last_start = c.t_ms;
            last_duration = c.trajectory.duration_ms;
        }
        if (auto t = only<TrialComplete>(out); !t.empty()) done = t[0];
    }
    ASSERT_TRUE(done);
    EXPECT_TRUE(done->completed);
    EXPECT_EQ(done->metrics.waypoints_reached, 6);
    EXPECT_LT(done->metrics.pct_time_outside_tolerance, 2.0);
}

TEST(SessionTick, SceneUpdatesAtConfiguredCadence) {
    Harness h;
    h.start("path1");
    int scenes = 1;
    for (int i = 1; i <= 40; ++i) scenes += static_cast<int>(only<SceneUpdate>(h.tick()).size());
    EXPECT_EQ(scenes, 11);
}

TEST(SessionTick, SensitivityApplies) {
    Harness h;
    h.tick({SetSensitivity{Sensitivity::Low}});
    EXPECT_EQ(h.s.sensitivity, Sensitivity::Low);
}

// --- live server ------------------------------------------------------------------------------

namespace {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

class WsClient {
public:
    WsClient(unsigned short port, const std::string& target = "/session") : ws_(ioc_) {
        tcp::resolver resolver(ioc_);
        net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
        ws_.handshake("127.0.0.1:" + std::to_string(port), target);
    }

    void send(const json& j) { ws_.write(net::buffer(j.dump())); }

    json read() {
        beast::flat_buffer b;
        ws_.read(b);
        return json::parse(beast::buffers_to_string(b.data()));
    }

    // Reads until a message of the given type arrives; everything read is kept in seen.
    json read_until(const std::string& type, int max_messages = 5000) {
        for (int i = 0; i < max_messages; ++i) {
            json j = read();
            seen.push_back(j);
            if (j.at("type") == type) return j;
        }
        throw std::runtime_error("no " + type + " message");
    }

    void close() { ws_.close(websocket::close_code::normal); }

    std::vector<json> seen;

private:
    net::io_context ioc_;
    websocket::stream<tcp::socket> ws_;
};

class LiveGateway : public ::testing::Test {
protected:
    void SetUp() override {
        GatewayConfig cfg;
        cfg.port = 0;
        server_ = std::make_unique<GatewayServer>(cfg, test_catalog());
        port_ = server_->start();
    }
    void TearDown() override { server_->stop(); }

    bool wait_for_sessions(std::size_t n) {
        const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(3);
        while (std::chrono::steady_clock::now() < deadline) {
            if (server_->active_sessions() == n) return true;
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        return false;
    }

    std::unique_ptr<GatewayServer> server_;
    unsigned short port_ = 0;
};

json start_msg(const std::string& path = "path1", const std::string& mode = "human") {
    return json{{"type", "start"}, {"path", path}, {"env", "empty"}, {"perception", "perfect"}, {"mode", mode}, {"seed", 3}};
}

}  // namespace

TEST_F(LiveGateway, StartThenSteersStreamsPoses) {
    WsClient c(port_);
    c.send(start_msg());
    const auto started = c.read_until("session_started");
    EXPECT_EQ(started.at("mode"), "human");
    EXPECT_EQ(started.at("tick_hz"), 20);
    auto pose = c.read_until("pose_update");
    EXPECT_EQ(pose.at("tick"), 0);
    std::int64_t tick = 0;
    for (int i = 0; i < 3; ++i) {
        c.send({{"type", "steer"}, {"action", "forward"}});
        const auto next = c.read_until("pose_update");
        EXPECT_GT(next.at("tick").get<std::int64_t>(), tick);
        tick = next.at("tick").get<std::int64_t>();
    }
    EXPECT_GT(c.read_until("pose_update").at("pose").at("x_m").get<double>(), 1.0);
}

TEST_F(LiveGateway, SessionsAreIsolated) {
    WsClient a(port_), b(port_);
    a.send(start_msg("path1"));
    b.send(start_msg("path2"));
    const auto sa = a.read_until("session_started");
    const auto sb = b.read_until("session_started");
    EXPECT_NE(sa.at("session_id"), sb.at("session_id"));
    EXPECT_EQ(sa.at("path").at("name"), "path1");
    EXPECT_EQ(sb.at("path").at("name"), "path2");
    for (int i = 0; i < 10; ++i) {
        EXPECT_EQ(a.read().at("session_id"), sa.at("session_id"));
        EXPECT_EQ(b.read().at("session_id"), sb.at("session_id"));
    }
    EXPECT_EQ(server_->active_sessions(), 2u);
}

TEST_F(LiveGateway, DisconnectDisposesSession) {
    {
        WsClient c(port_);
        c.send(start_msg());
        c.read_until("pose_update");
        EXPECT_EQ(server_->active_sessions(), 1u);
        c.close();
    }
    EXPECT_TRUE(wait_for_sessions(0));
}

TEST_F(LiveGateway, BadPathGetsErrorThenClose) {
    WsClient c(port_, "/elsewhere");
    const auto err = c.read();
    EXPECT_EQ(err.at("type"), "error");
    EXPECT_EQ(err.at("code"), "bad_path");
    EXPECT_THROW(c.read(), boost::system::system_error);
    EXPECT_TRUE(wait_for_sessions(0));
}

TEST_F(LiveGateway, MalformedMessageGetsError) {
    WsClient c(port_);
    c.send(json{{"type", "teleport"}});
    EXPECT_EQ(c.read_until("error").at("code"), "unknown_type");
    c.send(json{{"type", "steer"}, {"action", "left"}});
    EXPECT_EQ(c.read_until("error").at("code"), "not_started");
}

TEST_F(LiveGateway, Healthz) {
    httplib::Client http("127.0.0.1", port_);
    const auto res = http.Get("/healthz");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    const auto j = json::parse(res->body);
    EXPECT_EQ(j.at("status"), "ok");
    EXPECT_EQ(j.at("tick_hz"), 20);
    EXPECT_NE(std::find(j.at("paths").begin(), j.at("paths").end(), "path1"), j.at("paths").end());
    const auto missing = http.Get("/nope");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
}

TEST_F(LiveGateway, HumanDriveToCompletion) {
    WsClient c(port_);
    c.send(start_msg("short"));
    c.read_until("pose_update");
    std::optional<json> done;
    for (int i = 0; i < 50 && !done; ++i) {
        c.send({{"type", "steer"}, {"action", "forward"}});
        // one steer per tick: wait for the tick to land before sending the next
        for (;;) {
            const auto m = c.read();
            if (m.at("type") == "trial_complete") done = m;
            if (m.at("type") == "pose_update" || done) break;
        }
    }
    if (!done) {
        c.send({{"type", "steer"}, {"action", "stop"}});
        done = c.read_until("trial_complete", 100);
    }
    ASSERT_TRUE(done);
    EXPECT_TRUE(done->at("completed").get<bool>());
    EXPECT_EQ(done->at("metrics").at("waypoints_reached"), 2);
}

TEST_F(LiveGateway, ScriptedCuesNeverOverlap) {
    WsClient c(port_);
    c.send(start_msg("short", "scripted"));
    const auto done = c.read_until("trial_complete");
    EXPECT_TRUE(done.at("completed").get<bool>());
    std::int64_t end = -1;
    int cues = 0;
    for (const auto& m : c.seen) {
        if (m.at("type") != "cue_event") continue;
        ++cues;
        EXPECT_GE(m.at("t_ms").get<std::int64_t>(), end);
        end = m.at("t_ms").get<std::int64_t>() + m.at("duration_ms").get<std::int64_t>();
        EXPECT_EQ(m.at("trajectory").at("pattern"), m.at("pattern"));
    }
    EXPECT_GT(cues, 1);
}
