#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hapticnav/errors.hpp"

namespace hapticnav {

enum class HapticPatternId {
    TapFront,
    TapCenter,
    TapBack,
    TapLeft,
    TapRight,
    SlideFrontFast,
    SlideBackFast,
    SlideLeftFast,
    SlideRightFast,
    SlideFrontSlow,
    SlideBackSlow,
    SlideLeftSlow,
    SlideRightSlow,
};

inline constexpr std::size_t kPatternCount = 13;

inline constexpr std::array<HapticPatternId, kPatternCount> kAllPatterns{
    HapticPatternId::TapFront,       HapticPatternId::TapCenter,      HapticPatternId::TapBack,
    HapticPatternId::TapLeft,        HapticPatternId::TapRight,       HapticPatternId::SlideFrontFast,
    HapticPatternId::SlideBackFast,  HapticPatternId::SlideLeftFast,  HapticPatternId::SlideRightFast,
    HapticPatternId::SlideFrontSlow, HapticPatternId::SlideBackSlow,  HapticPatternId::SlideLeftSlow,
    HapticPatternId::SlideRightSlow,
};

inline constexpr std::array<std::string_view, kPatternCount> kPatternNames{
    "tap_front",       "tap_center",      "tap_back",         "tap_left",        "tap_right",
    "slide_front_fast", "slide_back_fast", "slide_left_fast",  "slide_right_fast", "slide_front_slow",
    "slide_back_slow", "slide_left_slow", "slide_right_slow",
};

inline std::size_t index_of(HapticPatternId id) { return static_cast<std::size_t>(id); }

inline std::string_view to_string(HapticPatternId id) { return kPatternNames[index_of(id)]; }

inline HapticPatternId parse_pattern(std::string_view name) {
    for (std::size_t i = 0; i < kPatternCount; ++i) {
        if (kPatternNames[i] == name) return kAllPatterns[i];
    }
    std::string valid;
    for (auto n : kPatternNames) {
        if (!valid.empty()) valid += ", ";
        valid += n;
    }
    throw InputError("unknown pattern '" + std::string(name) + "'; valid names: " + valid);
}

inline bool is_tap(HapticPatternId id) { return index_of(id) <= index_of(HapticPatternId::TapRight); }
inline bool is_slow_slide(HapticPatternId id) { return index_of(id) >= index_of(HapticPatternId::SlideFrontSlow); }
inline bool is_fast_slide(HapticPatternId id) { return !is_tap(id) && !is_slow_slide(id); }

enum class Temple { Left, Right };

inline std::string_view to_string(Temple t) { return t == Temple::Left ? "left" : "right"; }

inline constexpr double kWorkspaceMm = 70.0;
inline constexpr double kRestPositionMm = 35.0;
inline constexpr std::int64_t kTapDurationMs = 400;
inline constexpr std::int64_t kSlideFastMs = 1000;
inline constexpr std::int64_t kSlideSlowMs = 1500;
inline constexpr std::int64_t kLateralFirstPressMs = 300;

inline std::int64_t pattern_duration_ms(HapticPatternId id) {
    if (is_tap(id)) return kTapDurationMs;
    return is_slow_slide(id) ? kSlideSlowMs : kSlideFastMs;
}

struct ContactKeyframe {
    std::int64_t t_ms = 0;
    Temple temple = Temple::Left;
    double position_mm = kRestPositionMm;  // 0 = back of the temple, 70 = front
    double pressure = 0.0;

    bool operator==(const ContactKeyframe&) const = default;
};

struct PatternTrajectory {
    HapticPatternId pattern = HapticPatternId::TapCenter;
    std::vector<ContactKeyframe> keyframes;
    std::int64_t duration_ms = 0;

    bool uses(Temple t) const {
        return std::any_of(keyframes.begin(), keyframes.end(),
                           [t](const ContactKeyframe& k) { return k.temple == t; });
    }

    std::vector<ContactKeyframe> track(Temple t) const {
        std::vector<ContactKeyframe> out;
        for (const auto& k : keyframes) {
            if (k.temple == t) out.push_back(k);
        }
        return out;
    }
};

namespace detail {

inline void add_tap(std::vector<ContactKeyframe>& out, Temple temple, double pos) {
    out.push_back({0, temple, pos, 0.0});
    out.push_back({kTapDurationMs / 2, temple, pos, 1.0});
    out.push_back({kTapDurationMs, temple, pos, 0.0});
}

inline void add_sweep(std::vector<ContactKeyframe>& out, Temple temple, double from, double to,
                      std::int64_t duration) {
    out.push_back({0, temple, from, 1.0});
    out.push_back({duration, temple, to, 1.0});
}

// First temple pressed alone, second temple pressed with a 100 ms overlap and held to the end.
inline void add_handoff(std::vector<ContactKeyframe>& out, Temple first, Temple second,
                        std::int64_t duration) {
    const double pos = kRestPositionMm;
    const std::int64_t first_end = kLateralFirstPressMs;
    const std::int64_t second_start = first_end - 100;
    out.push_back({0, first, pos, 0.0});
    out.push_back({first_end / 2, first, pos, 1.0});
    out.push_back({first_end, first, pos, 0.0});
    out.push_back({second_start, second, pos, 0.0});
    out.push_back({first_end + 50, second, pos, 1.0});
    out.push_back({duration - 100, second, pos, 1.0});
    out.push_back({duration, second, pos, 0.0});
}

}  // namespace detail

inline PatternTrajectory compile_pattern(HapticPatternId id) {
    PatternTrajectory traj;
    traj.pattern = id;
    auto& kf = traj.keyframes;
    const std::int64_t duration = pattern_duration_ms(id);
    switch (id) {
        case HapticPatternId::TapFront:
        case HapticPatternId::TapCenter:
        case HapticPatternId::TapBack: {
            const double pos = id == HapticPatternId::TapFront ? kWorkspaceMm
                               : id == HapticPatternId::TapBack ? 0.0
                                                                : kRestPositionMm;
            detail::add_tap(kf, Temple::Left, pos);
            detail::add_tap(kf, Temple::Right, pos);
            break;
        }
        case HapticPatternId::TapLeft: detail::add_tap(kf, Temple::Left, kRestPositionMm); break;
        case HapticPatternId::TapRight: detail::add_tap(kf, Temple::Right, kRestPositionMm); break;
        case HapticPatternId::SlideFrontFast:
        case HapticPatternId::SlideFrontSlow:
            detail::add_sweep(kf, Temple::Left, 0.0, kWorkspaceMm, duration);
            detail::add_sweep(kf, Temple::Right, 0.0, kWorkspaceMm, duration);
            break;
        case HapticPatternId::SlideBackFast:
        case HapticPatternId::SlideBackSlow:
            detail::add_sweep(kf, Temple::Left, kWorkspaceMm, 0.0, duration);
            detail::add_sweep(kf, Temple::Right, kWorkspaceMm, 0.0, duration);
            break;
        case HapticPatternId::SlideLeftFast:
        case HapticPatternId::SlideLeftSlow:
            detail::add_handoff(kf, Temple::Right, Temple::Left, duration);
            break;
        case HapticPatternId::SlideRightFast:
        case HapticPatternId::SlideRightSlow:
            detail::add_handoff(kf, Temple::Left, Temple::Right, duration);
            break;
    }
    std::stable_sort(kf.begin(), kf.end(), [](const ContactKeyframe& a, const ContactKeyframe& b) {
        if (a.t_ms != b.t_ms) return a.t_ms < b.t_ms;
        return a.temple < b.temple;
    });
    traj.duration_ms = kf.back().t_ms;
    return traj;
}

// Interpolated contact state of one temple at time t; clamps outside the track's span.
inline ContactKeyframe sample_track(const std::vector<ContactKeyframe>& track, std::int64_t t_ms) {
    if (track.empty()) return {t_ms, Temple::Left, kRestPositionMm, 0.0};
    if (t_ms <= track.front().t_ms) return {t_ms, track.front().temple, track.front().position_mm, track.front().pressure};
    if (t_ms >= track.back().t_ms) return {t_ms, track.back().temple, track.back().position_mm, track.back().pressure};
    for (std::size_t i = 1; i < track.size(); ++i) {
        const auto& a = track[i - 1];
        const auto& b = track[i];
        if (t_ms <= b.t_ms) {
            const double span = static_cast<double>(b.t_ms - a.t_ms);
            const double u = span > 0.0 ? static_cast<double>(t_ms - a.t_ms) / span : 1.0;
            return {t_ms, a.temple, a.position_mm + u * (b.position_mm - a.position_mm),
                    a.pressure + u * (b.pressure - a.pressure)};
        }
    }
    return track.back();
}

}  // namespace hapticnav
