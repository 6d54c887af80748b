#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hapticnav/errors.hpp"
#include "hapticnav/prompt_template.hpp"
#include "hapticnav/scene.hpp"

namespace hapticnav {

enum class Sensitivity { Low, Medium, High };

inline std::string_view to_string(Sensitivity s) {
    switch (s) {
        case Sensitivity::Low: return "low";
        case Sensitivity::Medium: return "medium";
        case Sensitivity::High: return "high";
    }
    return "?";
}

inline Sensitivity parse_sensitivity(std::string_view text) {
    for (auto s : {Sensitivity::Low, Sensitivity::Medium, Sensitivity::High}) {
        if (to_string(s) == text) return s;
    }
    throw ConfigError("unknown sensitivity '" + std::string(text) + "' (expected low|medium|high)");
}

enum class NavCommand { Left, Right, Forward, Stop };

inline std::string_view to_string(NavCommand c) {
    switch (c) {
        case NavCommand::Left: return "left";
        case NavCommand::Right: return "right";
        case NavCommand::Forward: return "forward";
        case NavCommand::Stop: return "stop";
    }
    return "?";
}

inline NavCommand parse_nav_command_name(std::string_view text) {
    for (auto c : {NavCommand::Left, NavCommand::Right, NavCommand::Forward, NavCommand::Stop}) {
        if (to_string(c) == text) return c;
    }
    throw InputError("unknown command '" + std::string(text) + "'");
}

struct NavPrompt {
    std::string system_text;
    std::string scene_text;
    Sensitivity sensitivity = Sensitivity::High;
    std::int64_t first_frame_id = 0;
    std::int64_t last_frame_id = 0;

    // Fully rendered user message.
    std::string user_text() const {
        std::string out(prompt_template::kUserTemplate);
        auto replace = [&out](std::string_view key, const std::string& value) {
            const auto pos = out.find(key);
            if (pos != std::string::npos) out.replace(pos, key.size(), value);
        };
        replace("{first}", std::to_string(first_frame_id));
        replace("{last}", std::to_string(last_frame_id));
        replace("{sensitivity}", std::string(to_string(sensitivity)));
        replace("{scene}", scene_text);
        return out;
    }

    // Obstacle lines only; the empty-scene sentinel yields no lines.
    std::vector<std::string> object_lines() const {
        std::vector<std::string> lines;
        if (scene_text == prompt_template::kEmptyScene) return lines;
        std::size_t start = 0;
        while (start <= scene_text.size()) {
            const auto end = scene_text.find('\n', start);
            lines.push_back(scene_text.substr(start, end == std::string::npos ? std::string::npos : end - start));
            if (end == std::string::npos) break;
            start = end + 1;
        }
        return lines;
    }
};

inline std::string format_distance(std::optional<double> d) {
    if (!d) return "unknown distance";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f m", *d);
    return buf;
}

inline std::string render_object_line(const ConsolidatedObject& obj) {
    std::string line = obj.label + " at " + to_string(obj.cell) + ", " + format_distance(obj.distance_m);
    if (obj.immediate_hazard) line += ", IMMEDIATE HAZARD";
    return line;
}

inline bool reported_at(const ConsolidatedObject& obj, Sensitivity s) {
    switch (s) {
        case Sensitivity::Low: return obj.immediate_hazard;
        case Sensitivity::Medium: return obj.immediate_hazard || obj.cell.row == GridRow::Bottom;
        case Sensitivity::High: return true;
    }
    return true;
}

inline NavPrompt build_prompt(const SceneSummary& summary, Sensitivity sensitivity) {
    NavPrompt prompt;
    prompt.system_text = std::string(prompt_template::kSystemText);
    prompt.sensitivity = sensitivity;
    prompt.first_frame_id = summary.first_frame_id;
    prompt.last_frame_id = summary.last_frame_id;

    std::vector<const ConsolidatedObject*> ordered;
    for (const auto& obj : summary.objects) {
        if (reported_at(obj, sensitivity)) ordered.push_back(&obj);
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const ConsolidatedObject* a, const ConsolidatedObject* b) {
                         return a->priority > b->priority;
                     });
    if (ordered.empty()) {
        prompt.scene_text = std::string(prompt_template::kEmptyScene);
        return prompt;
    }
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        if (i) prompt.scene_text += '\n';
        prompt.scene_text += render_object_line(*ordered[i]);
    }
    return prompt;
}

// First whole-word keyword in reading order, case-insensitive.
inline NavCommand parse_command(std::string_view response_text) {
    std::size_t i = 0;
    const std::size_t n = response_text.size();
    auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    while (i < n) {
        while (i < n && !is_word(response_text[i])) ++i;
        std::string word;
        while (i < n && is_word(response_text[i])) {
            word += static_cast<char>(std::tolower(static_cast<unsigned char>(response_text[i])));
            ++i;
        }
        if (word.empty()) continue;
        if (word == "left") return NavCommand::Left;
        if (word == "right") return NavCommand::Right;
        if (word == "forward" || word == "straight" || word == "ahead") return NavCommand::Forward;
        if (word == "stop" || word == "halt" || word == "wait") return NavCommand::Stop;
    }
    throw ParseError("no navigation keyword in response");
}

// Side occupancy: sum of 1/d over bottom-row objects in that column; unknown range costs 2.0.
inline double side_cost(const SceneSummary& summary, GridColumn side) {
    double cost = 0.0;
    for (const auto& obj : summary.objects) {
        if (obj.cell.row != GridRow::Bottom || obj.cell.column != side) continue;
        cost += obj.distance_m ? 1.0 / *obj.distance_m : 2.0;
    }
    return cost;
}

inline constexpr double kBlockedSideCost = 2.0;

inline NavCommand fallback_policy(const SceneSummary& summary) {
    if (!summary.has_immediate_hazard()) return NavCommand::Forward;
    const double left = side_cost(summary, GridColumn::Left);
    const double right = side_cost(summary, GridColumn::Right);
    if (left >= kBlockedSideCost && right >= kBlockedSideCost) return NavCommand::Stop;
    if (left < right) return NavCommand::Left;
    if (right < left) return NavCommand::Right;
    // Equal costs below the blocking threshold; arbitrary but fixed.
    return NavCommand::Left;
}

enum class DecisionSource { Llm, Fallback };

inline std::string_view to_string(DecisionSource s) { return s == DecisionSource::Llm ? "llm" : "fallback"; }

struct Decision {
    NavCommand command = NavCommand::Stop;
    DecisionSource source = DecisionSource::Fallback;
    double latency_ms = 0.0;
    std::optional<std::string> raw_response;
    std::optional<std::string> fallback_reason;
};

struct PolicyConfig {
    Sensitivity sensitivity = Sensitivity::Medium;
    std::string llm_endpoint = "https://api.openai.com/v1/chat/completions";
    std::string llm_model = "gpt-4o";
    int timeout_ms = 3000;
    bool fallback_enabled = true;
    std::string api_key_env = "HAPTICNAV_API_KEY";

    void validate() const {
        if (timeout_ms <= 0) throw ConfigError("policy timeout_ms must be positive");
    }
};

class LlmTimeout : public std::runtime_error {
public:
    explicit LlmTimeout(const std::string& what, std::optional<double> recorded_latency_ms = std::nullopt)
        : std::runtime_error(what), recorded_latency_ms_(recorded_latency_ms) {}
    // Set by replaying clients so a recorded timeout keeps its recorded wait.
    std::optional<double> recorded_latency_ms() const { return recorded_latency_ms_; }

private:
    std::optional<double> recorded_latency_ms_;
};

class LlmTransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LlmReply {
    std::string text;
    // Recorded latency supplied by replaying clients; live clients leave it empty.
    std::optional<double> latency_ms;
};

// Blocking chat-completion style client. Throws LlmTimeout or LlmTransportError.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual LlmReply complete(const NavPrompt& prompt, std::chrono::milliseconds timeout) = 0;
    virtual std::string name() const = 0;
    // Replaying clients key recorded responses by scene or frame span; live clients ignore it.
    virtual void set_request_key(std::string_view) {}
};

inline Decision decide(const SceneSummary& summary, const PolicyConfig& config, LlmClient* client) {
    config.validate();
    if (client == nullptr) {
        if (!config.fallback_enabled) throw DecisionError("no language model client and fallback disabled");
        return Decision{fallback_policy(summary), DecisionSource::Fallback, 0.0, std::nullopt, "no client"};
    }

    const auto started = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    };
    const NavPrompt prompt = build_prompt(summary, config.sensitivity);
    std::string reason;
    std::optional<std::string> raw;
    std::optional<double> recorded_latency;
    try {
        LlmReply reply = client->complete(prompt, std::chrono::milliseconds(config.timeout_ms));
        raw = reply.text;
        recorded_latency = reply.latency_ms;
        const NavCommand cmd = parse_command(reply.text);
        return Decision{cmd, DecisionSource::Llm, recorded_latency.value_or(elapsed_ms()), std::move(raw),
                        std::nullopt};
    } catch (const LlmTimeout& e) {
        reason = std::string("timeout: ") + e.what();
        recorded_latency = e.recorded_latency_ms();
    } catch (const LlmTransportError& e) {
        reason = std::string("transport: ") + e.what();
    } catch (const ParseError& e) {
        reason = std::string("parse: ") + e.what();
    }
    if (!config.fallback_enabled) throw DecisionError("language model route failed (" + reason + ") and fallback disabled");
    return Decision{fallback_policy(summary), DecisionSource::Fallback, recorded_latency.value_or(elapsed_ms()),
                    std::move(raw), std::move(reason)};
}

}  // namespace hapticnav
