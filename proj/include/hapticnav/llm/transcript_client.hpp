#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>

#include "hapticnav/errors.hpp"
#include "hapticnav/io/json.hpp"
#include "hapticnav/policy.hpp"

namespace hapticnav {

// Replays recorded model responses keyed by scene id or frame span ("f<first>-<last>").
// Recorded latencies are returned as-is so decision logs are byte-stable across runs.
class TranscriptLlmClient : public LlmClient {
public:
    struct Entry {
        std::string text;
        std::optional<double> latency_ms;
        bool timed_out = false;
    };

    explicit TranscriptLlmClient(std::map<std::string, Entry> entries, std::string source = "transcript")
        : entries_(std::move(entries)), source_(std::move(source)) {}

    static TranscriptLlmClient from_json(const json& j, std::string source = "transcript") {
        if (!j.contains("responses") || !j.at("responses").is_array()) {
            throw ConfigError("transcript '" + source + "' has no responses array");
        }
        std::map<std::string, Entry> entries;
        for (const auto& r : j.at("responses")) {
            Entry e;
            const std::string outcome = io::get_or(r, "outcome", std::string("ok"));
            if (outcome != "ok" && outcome != "timeout") {
                throw ConfigError("transcript outcome must be ok or timeout, got '" + outcome + "'");
            }
            e.timed_out = outcome == "timeout";
            e.text = io::get_or(r, "text", std::string());
            e.latency_ms = io::optional_number(r, "latency_ms");
            const auto key = r.at("key").get<std::string>();
            if (!entries.emplace(key, std::move(e)).second) throw ConfigError("duplicate transcript key '" + key + "'");
        }
        return TranscriptLlmClient(std::move(entries), std::move(source));
    }

    static TranscriptLlmClient load(const std::string& path) { return from_json(io::read_json_file(path), path); }

    static std::string span_key(std::int64_t first, std::int64_t last) {
        return "f" + std::to_string(first) + "-" + std::to_string(last);
    }

    void set_request_key(std::string_view key) override { key_ = std::string(key); }

    LlmReply complete(const NavPrompt& prompt, std::chrono::milliseconds) override {
        const std::string key = key_ ? *key_ : span_key(prompt.first_frame_id, prompt.last_frame_id);
        key_.reset();
        auto it = entries_.find(key);
        if (it == entries_.end()) throw LlmTransportError("no recorded response for '" + key + "'");
        if (it->second.timed_out) throw LlmTimeout("recorded timeout for '" + key + "'", it->second.latency_ms);
        return LlmReply{it->second.text, it->second.latency_ms};
    }

    std::string name() const override { return "transcript"; }
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, Entry> entries_;
    std::string source_;
    std::optional<std::string> key_;
};

}  // namespace hapticnav
