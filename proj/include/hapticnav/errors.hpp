#pragma once

#include <stdexcept>
#include <string>

namespace hapticnav {

// Malformed or out-of-contract input data (bad bbox, out-of-order frame, ...).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class KinematicsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No navigation keyword found in a model response.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every decision route failed and the fallback is disabled.
class DecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EncodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Wire line rejected by the decoder; column is the 0-based byte offset of the fault.
class DecodeError : public std::runtime_error {
public:
    DecodeError(const std::string& what, std::size_t column)
        : std::runtime_error(what + " (at byte " + std::to_string(column) + ")"), column_(column) {}

    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

}  // namespace hapticnav
