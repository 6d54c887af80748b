#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "hapticnav/errors.hpp"
#include "hapticnav/haptics/render.hpp"

// Device link, one ASCII line per servo command:
//
//   S,<L|R>,<angle1 centidegrees>,<angle2 centidegrees>,<t_ms>\n
//
// Integers are plain decimal, no leading '+' or zeros; angles may be negative.
namespace hapticnav::wire {

struct Limits {
    std::int32_t min_cdeg = 0;
    std::int32_t max_cdeg = 18000;

    static Limits from_geometry(const LinkageGeometry& g) {
        return {to_centidegrees(g.servo_min_deg), to_centidegrees(g.servo_max_deg)};
    }
};

inline std::string encode(const ServoCommand& cmd, const Limits& limits = {}) {
    for (auto a : {cmd.angle1_cdeg, cmd.angle2_cdeg}) {
        if (a < limits.min_cdeg || a > limits.max_cdeg) {
            throw EncodeError("angle " + std::to_string(a) + " cdeg outside limits [" +
                              std::to_string(limits.min_cdeg) + ", " + std::to_string(limits.max_cdeg) + "]");
        }
    }
    if (cmd.t_ms < 0) throw EncodeError("negative timestamp");
    std::string line = "S,";
    line += cmd.temple == Temple::Left ? 'L' : 'R';
    line += ',';
    line += std::to_string(cmd.angle1_cdeg);
    line += ',';
    line += std::to_string(cmd.angle2_cdeg);
    line += ',';
    line += std::to_string(cmd.t_ms);
    line += '\n';
    return line;
}

namespace detail {

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    std::size_t pos() const { return pos_; }

    void expect(char c, const char* what) {
        if (pos_ >= s_.size() || s_[pos_] != c) throw DecodeError(std::string("expected ") + what, pos_);
        ++pos_;
    }

    char take_temple() {
        if (pos_ >= s_.size() || (s_[pos_] != 'L' && s_[pos_] != 'R')) {
            throw DecodeError("expected temple 'L' or 'R'", pos_);
        }
        return s_[pos_++];
    }

    std::int64_t take_int(bool allow_negative, std::int64_t lo, std::int64_t hi, const char* field) {
        const std::size_t start = pos_;
        bool negative = false;
        if (allow_negative && pos_ < s_.size() && s_[pos_] == '-') {
            negative = true;
            ++pos_;
        }
        const std::size_t digits_start = pos_;
        std::int64_t value = 0;
        while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') {
            if (pos_ - digits_start >= 18) throw DecodeError(std::string(field) + " has too many digits", start);
            value = value * 10 + (s_[pos_] - '0');
            ++pos_;
        }
        const std::size_t ndigits = pos_ - digits_start;
        if (ndigits == 0) throw DecodeError(std::string("expected digits for ") + field, digits_start);
        if (ndigits > 1 && s_[digits_start] == '0') throw DecodeError(std::string(field) + " has a leading zero", digits_start);
        if (negative && value == 0) throw DecodeError(std::string(field) + " is negative zero", start);
        if (negative) value = -value;
        if (value < lo || value > hi) throw DecodeError(std::string(field) + " out of range", start);
        return value;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Exact inverse of encode on its valid domain; the line must include its trailing '\n'.
inline ServoCommand decode(std::string_view line, const Limits& limits = {}) {
    detail::Cursor c(line);
    c.expect('S', "'S' record tag");
    c.expect(',', "','");
    ServoCommand cmd;
    cmd.temple = c.take_temple() == 'L' ? Temple::Left : Temple::Right;
    c.expect(',', "','");
    cmd.angle1_cdeg = static_cast<std::int32_t>(c.take_int(true, limits.min_cdeg, limits.max_cdeg, "angle1"));
    c.expect(',', "','");
    cmd.angle2_cdeg = static_cast<std::int32_t>(c.take_int(true, limits.min_cdeg, limits.max_cdeg, "angle2"));
    c.expect(',', "','");
    cmd.t_ms = c.take_int(false, 0, std::numeric_limits<std::int64_t>::max() / 10, "t_ms");
    c.expect('\n', "line terminator");
    if (c.pos() != line.size()) throw DecodeError("trailing bytes after line terminator", c.pos());
    return cmd;
}

inline std::string encode_stream(const std::vector<ServoCommand>& cmds, const Limits& limits = {}) {
    std::string out;
    for (const auto& c : cmds) out += encode(c, limits);
    return out;
}

// Splits a byte stream at '\n' and decodes each line. line_number in errors is 1-based.
inline std::vector<ServoCommand> decode_stream(std::string_view bytes, const Limits& limits = {}) {
    std::vector<ServoCommand> out;
    std::size_t start = 0;
    std::size_t line_no = 1;
    while (start < bytes.size()) {
        const auto nl = bytes.find('\n', start);
        const std::size_t end = nl == std::string_view::npos ? bytes.size() : nl + 1;
        try {
            out.push_back(decode(bytes.substr(start, end - start), limits));
        } catch (const DecodeError& e) {
            throw DecodeError("line " + std::to_string(line_no) + ": " + e.what(), start + e.column());
        }
        start = end;
        ++line_no;
    }
    return out;
}

}  // namespace hapticnav::wire
