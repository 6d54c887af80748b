#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "hapticnav/cli.hpp"
#include "hapticnav/llm/http_client.hpp"
#include "hapticnav/llm/transcript_client.hpp"

using namespace hapticnav;
using namespace std::chrono_literals;

namespace {

// Local stand-in for a chat-completion endpoint.
class MockEndpoint {
public:
    MockEndpoint() {
        svr_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            last_auth_ = req.get_header_value("Authorization");
            last_body_ = req.body;
            if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_.load()));
            res.status = status_;
            res.set_content(body_, "application/json");
        });
        port_ = svr_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { svr_.listen_after_bind(); });
        svr_.wait_until_ready();
    }
    ~MockEndpoint() {
        svr_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
    void reply(int status, std::string body) {
        status_ = status;
        body_ = std::move(body);
    }
    static std::string content(const std::string& text) {
        return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", text}}}}})}}.dump();
    }

    std::atomic<int> delay_ms_{0};
    std::string last_auth_;
    std::string last_body_;

private:
    httplib::Server svr_;
    std::thread thread_;
    int port_ = 0;
    int status_ = 200;
    std::string body_ = content("Forward");
};

SceneSummary summary_with_hazard() {
    SceneSummary s;
    s.first_frame_id = 10;
    s.last_frame_id = 14;
    s.objects.push_back({"chair", GridCell{GridRow::Bottom, GridColumn::Center}, 0.7, 5, 1.4, true});
    return s;
}

NavPrompt prompt() { return build_prompt(summary_with_hazard(), Sensitivity::Medium); }

}  // namespace

TEST(HttpLlm, SuccessSendsModelAndBearer) {
    MockEndpoint mock;
    mock.reply(200, MockEndpoint::content("Left."));
    HttpLlmClient client(mock.url(), "test-model", "sk-test");
    const auto reply = client.complete(prompt(), 2000ms);
    EXPECT_EQ(reply.text, "Left.");
    EXPECT_FALSE(reply.latency_ms);
    EXPECT_EQ(mock.last_auth_, "Bearer sk-test");
    const auto body = json::parse(mock.last_body_);
    EXPECT_EQ(body.at("model"), "test-model");
    EXPECT_EQ(body.at("messages").size(), 2u);
    EXPECT_EQ(body.at("messages")[1].at("content"), prompt().user_text());
}

TEST(HttpLlm, DecideUsesTheReply) {
    MockEndpoint mock;
    mock.reply(200, MockEndpoint::content("Right"));
    HttpLlmClient client(mock.url(), "m", "k");
    PolicyConfig cfg;
    cfg.timeout_ms = 2000;
    const auto d = decide(summary_with_hazard(), cfg, &client);
    EXPECT_EQ(d.command, NavCommand::Right);
    EXPECT_EQ(d.source, DecisionSource::Llm);
}

TEST(HttpLlm, SlowServerTimesOut) {
    MockEndpoint mock;
    mock.delay_ms_ = 600;
    HttpLlmClient client(mock.url(), "m", "k");
    EXPECT_THROW(client.complete(prompt(), 150ms), LlmTimeout);

    PolicyConfig cfg;
    cfg.timeout_ms = 150;
    const auto d = decide(summary_with_hazard(), cfg, &client);
    EXPECT_EQ(d.source, DecisionSource::Fallback);
    EXPECT_EQ(d.command, fallback_policy(summary_with_hazard()));
}

TEST(HttpLlm, ServerErrorIsTransport) {
    MockEndpoint mock;
    mock.reply(500, "{}");
    HttpLlmClient client(mock.url(), "m", "k");
    EXPECT_THROW(client.complete(prompt(), 2000ms), LlmTransportError);
}

TEST(HttpLlm, MalformedBodyIsTransport) {
    MockEndpoint mock;
    HttpLlmClient client(mock.url(), "m", "k");
    mock.reply(200, "not json");
    EXPECT_THROW(client.complete(prompt(), 2000ms), LlmTransportError);
    mock.reply(200, R"({"choices": []})");
    EXPECT_THROW(client.complete(prompt(), 2000ms), LlmTransportError);
}

TEST(HttpLlm, RefusedConnectionIsTransport) {
    int port = 0;
    {
        MockEndpoint mock;
        port = std::stoi(mock.url().substr(17, mock.url().find('/', 17) - 17));
    }
    HttpLlmClient client("http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions", "m", "k");
    EXPECT_THROW(client.complete(prompt(), 1000ms), LlmTransportError);
}

TEST(Endpoint, Split) {
    const auto e = split_endpoint("https://api.example.com:8443/v1/chat/completions");
    EXPECT_EQ(e.scheme_host_port, "https://api.example.com:8443");
    EXPECT_EQ(e.path, "/v1/chat/completions");
    EXPECT_EQ(split_endpoint("http://localhost").path, "/");
    EXPECT_THROW(split_endpoint("api.example.com/v1"), ConfigError);
    EXPECT_THROW(split_endpoint("ftp://host/x"), ConfigError);
}

TEST(Endpoint, ResponseText) {
    EXPECT_EQ(chat_response_text(MockEndpoint::content("Stop")), "Stop");
    EXPECT_THROW(chat_response_text(R"({"choices": [{"message": {}}]})"), LlmTransportError);
}

TEST(Transcript, KeysBySpan) {
    EXPECT_EQ(TranscriptLlmClient::span_key(10, 14), "f10-14");
    auto client = TranscriptLlmClient::from_json(json::parse(R"({"responses": [
        {"key": "f10-14", "text": "Left", "outcome": "ok", "latency_ms": 420.0},
        {"key": "f15-19", "outcome": "timeout", "latency_ms": 3000.0}]})"));
    const auto reply = client.complete(prompt(), 1000ms);
    EXPECT_EQ(reply.text, "Left");
    EXPECT_EQ(reply.latency_ms, 420.0);

    const auto d = decide(summary_with_hazard(), PolicyConfig{}, &client);
    EXPECT_EQ(d.command, NavCommand::Left);
    EXPECT_DOUBLE_EQ(d.latency_ms, 420.0);
}

TEST(Transcript, RecordedTimeoutKeepsLatency) {
    auto client = TranscriptLlmClient::from_json(
        json::parse(R"({"responses": [{"key": "f10-14", "outcome": "timeout", "latency_ms": 3000.0}]})"));
    try {
        client.complete(prompt(), 1000ms);
        FAIL() << "expected LlmTimeout";
    } catch (const LlmTimeout& e) {
        EXPECT_EQ(e.recorded_latency_ms(), 3000.0);
    }
    const auto d = decide(summary_with_hazard(), PolicyConfig{}, &client);
    EXPECT_EQ(d.source, DecisionSource::Fallback);
    EXPECT_DOUBLE_EQ(d.latency_ms, 3000.0);
}

TEST(Transcript, MissingKeyFallsBack) {
    auto client = TranscriptLlmClient::from_json(json::parse(R"({"responses": []})"));
    EXPECT_THROW(client.complete(prompt(), 1000ms), LlmTransportError);
    EXPECT_EQ(decide(summary_with_hazard(), PolicyConfig{}, &client).source, DecisionSource::Fallback);
}

TEST(Transcript, InvalidDocuments) {
    EXPECT_THROW(TranscriptLlmClient::from_json(json::object()), ConfigError);
    EXPECT_THROW(TranscriptLlmClient::from_json(json::parse(
                     R"({"responses": [{"key": "a", "text": "x", "outcome": "maybe"}]})")),
                 ConfigError);
    EXPECT_THROW(TranscriptLlmClient::from_json(json::parse(
                     R"({"responses": [{"key": "a", "text": "x"}, {"key": "a", "text": "y"}]})")),
                 ConfigError);
}

TEST(ClientFactory, LiveRouteNeedsEnvironmentKey) {
    PolicyConfig cfg;
    cfg.api_key_env = "HAPTICNAV_TEST_UNSET_KEY";
    ::unsetenv(cfg.api_key_env.c_str());
    EXPECT_THROW(cli::make_llm_client("http", cfg, std::nullopt), cli::UsageError);
    ::setenv(cfg.api_key_env.c_str(), "sk-from-env", 1);
    const auto client = cli::make_llm_client("http", cfg, std::nullopt);
    ASSERT_TRUE(client);
    EXPECT_EQ(client->name(), "llm");
    ::unsetenv(cfg.api_key_env.c_str());

    EXPECT_EQ(cli::make_llm_client("fallback", cfg, std::nullopt), nullptr);
    EXPECT_THROW(cli::make_llm_client("transcript", cfg, std::nullopt), cli::UsageError);
    EXPECT_THROW(cli::make_llm_client("oracle", cfg, std::nullopt), cli::UsageError);
}
