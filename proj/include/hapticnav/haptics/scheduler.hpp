#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <vector>

#include "hapticnav/errors.hpp"
#include "hapticnav/haptics/patterns.hpp"

namespace hapticnav {

struct SchedulerConfig {
    // Quiet time after each pattern before the next may start.
    std::int64_t rest_gap_ms = 250;
    // Budget a navigation cue (play + rest gap) must fit in.
    std::int64_t cue_budget_ms = 1250;
};

struct Playback {
    HapticPatternId pattern = HapticPatternId::TapCenter;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;         // start + pattern duration
    std::int64_t busy_until_ms = 0;  // end + rest gap

    bool operator==(const Playback&) const = default;
};

enum class SubmitResult { Accepted, Coalesced };

// Non-preemptive single-channel playback with a one-slot pending queue. A submission while busy
// overwrites the pending slot; the pending pattern starts exactly when the busy window ends.
class HapticScheduler {
public:
    explicit HapticScheduler(SchedulerConfig cfg = {}) : cfg_(cfg) {
        if (cfg_.rest_gap_ms < 0) throw ConfigError("rest gap must be non-negative");
    }

    const SchedulerConfig& config() const { return cfg_; }

    std::int64_t busy_window_ms(HapticPatternId id) const { return pattern_duration_ms(id) + cfg_.rest_gap_ms; }

    // Promotes the pending pattern if the current window has ended by t_now. Returns the
    // playbacks that started in (previous call, t_now].
    std::vector<Playback> advance(std::int64_t t_now_ms) {
        std::vector<Playback> started;
        while (current_ && t_now_ms >= current_->busy_until_ms) {
            if (!pending_) {
                current_.reset();
                break;
            }
            const std::int64_t at = current_->busy_until_ms;
            start(*pending_, at);
            pending_.reset();
            started.push_back(*current_);
        }
        return started;
    }

    SubmitResult submit(HapticPatternId id, std::int64_t t_now_ms) {
        advance(t_now_ms);
        if (!current_) {
            start(id, t_now_ms);
            return SubmitResult::Accepted;
        }
        pending_ = id;
        return SubmitResult::Coalesced;
    }

    bool busy(std::int64_t t_now_ms) const { return current_ && t_now_ms < current_->busy_until_ms; }

    // The pattern physically playing at t (rest gap excluded).
    std::optional<Playback> playing(std::int64_t t_now_ms) const {
        if (current_ && t_now_ms >= current_->start_ms && t_now_ms < current_->end_ms) return current_;
        return std::nullopt;
    }

    const std::optional<Playback>& current() const { return current_; }
    const std::optional<HapticPatternId>& pending() const { return pending_; }
    const std::vector<Playback>& history() const { return history_; }

    void reset() {
        current_.reset();
        pending_.reset();
        history_.clear();
    }

private:
    void start(HapticPatternId id, std::int64_t at) {
        const std::int64_t dur = pattern_duration_ms(id);
        current_ = Playback{id, at, at + dur, at + dur + cfg_.rest_gap_ms};
        history_.push_back(*current_);
    }

    SchedulerConfig cfg_;
    std::optional<Playback> current_;
    std::optional<HapticPatternId> pending_;
    std::vector<Playback> history_;
};

// Serializes submissions arriving from several threads onto one scheduler.
class SharedScheduler {
public:
    explicit SharedScheduler(SchedulerConfig cfg = {}) : inner_(cfg) {}

    SubmitResult submit(HapticPatternId id, std::int64_t t_now_ms) {
        std::lock_guard lock(mu_);
        return inner_.submit(id, t_now_ms);
    }

    std::vector<Playback> advance(std::int64_t t_now_ms) {
        std::lock_guard lock(mu_);
        return inner_.advance(t_now_ms);
    }

    std::vector<Playback> history() const {
        std::lock_guard lock(mu_);
        return inner_.history();
    }

private:
    mutable std::mutex mu_;
    HapticScheduler inner_;
};

}  // namespace hapticnav
