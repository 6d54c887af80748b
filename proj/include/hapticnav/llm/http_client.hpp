#pragma once

#include <chrono>
#include <cstdlib>
#include <string>

#include <httplib.h>

#include "hapticnav/errors.hpp"
#include "hapticnav/io/json.hpp"
#include "hapticnav/policy.hpp"

namespace hapticnav {

struct Endpoint {
    std::string scheme_host_port;  // e.g. "https://api.openai.com"
    std::string path;              // e.g. "/v1/chat/completions"
};

inline Endpoint split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint '" + url + "' lacks a scheme");
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ConfigError("endpoint scheme must be http or https: '" + url + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

// Reads the credential named by the config from the environment; empty if unset.
inline std::string api_key_from_env(const PolicyConfig& cfg) {
    const char* v = std::getenv(cfg.api_key_env.c_str());
    return v ? std::string(v) : std::string();
}

inline json chat_request_body(const NavPrompt& prompt, const std::string& model) {
    return json{{"model", model},
                {"temperature", 0},
                {"max_tokens", 8},
                {"messages", json::array({{{"role", "system"}, {"content", prompt.system_text}},
                                          {{"role", "user"}, {"content", prompt.user_text()}}})}};
}

inline std::string chat_response_text(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw LlmTransportError(std::string("response is not JSON: ") + e.what());
    }
    try {
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw LlmTransportError("response lacks choices[0].message.content");
    }
}

// Chat-completion client over HTTP(S). One blocking request per call.
class HttpLlmClient : public LlmClient {
public:
    HttpLlmClient(std::string endpoint, std::string model, std::string api_key)
        : endpoint_(split_endpoint(endpoint)), model_(std::move(model)), api_key_(std::move(api_key)) {}

    LlmReply complete(const NavPrompt& prompt, std::chrono::milliseconds timeout) override {
        httplib::Client cli(endpoint_.scheme_host_port);
        const auto secs = timeout.count() / 1000;
        const auto usecs = (timeout.count() % 1000) * 1000;
        cli.set_connection_timeout(secs, usecs);
        cli.set_read_timeout(secs, usecs);
        cli.set_write_timeout(secs, usecs);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        const auto started = std::chrono::steady_clock::now();
        auto res = cli.Post(endpoint_.path, headers, chat_request_body(prompt, model_).dump(), "application/json");
        const auto elapsed = std::chrono::steady_clock::now() - started;
        if (!res) {
            const auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && elapsed >= timeout)) {
                throw LlmTimeout("no response within " + std::to_string(timeout.count()) + " ms");
            }
            throw LlmTransportError("request failed: " + httplib::to_string(err));
        }
        if (res->status != 200) throw LlmTransportError("HTTP status " + std::to_string(res->status));
        return LlmReply{chat_response_text(res->body), std::nullopt};
    }

    std::string name() const override { return "llm"; }

private:
    Endpoint endpoint_;
    std::string model_;
    std::string api_key_;
};

}  // namespace hapticnav
