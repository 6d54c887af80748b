#pragma once

#include <string_view>

// Wording sent to the language model. Recorded transcripts are keyed to this version;
// bump it whenever any string below changes.
namespace hapticnav::prompt_template {

inline constexpr std::string_view kVersion = "nav-prompt-v1";

inline constexpr std::string_view kSystemText =
    "You are the navigation assistant of a wearable device for a blind pedestrian. "
    "You receive obstacles detected by a head-mounted camera, located in a 2x3 image grid "
    "(rows: top, bottom; columns: left, center, right) with estimated distances in meters. "
    "Obstacles marked IMMEDIATE HAZARD are directly ahead and closer than one meter. "
    "Choose the single safest next motion. Answer with exactly one word among: "
    "left, right, forward, stop.";

// Placeholders: {first}, {last}, {sensitivity}, {scene}.
inline constexpr std::string_view kUserTemplate =
    "Frames {first}-{last}, sensitivity {sensitivity}.\n"
    "Obstacles:\n"
    "{scene}\n"
    "Next motion (one word):";

inline constexpr std::string_view kEmptyScene = "no obstacles detected";

}  // namespace hapticnav::prompt_template
