#pragma once

#include <stdexcept>
#include <string>

namespace adavaw {

// Thrown when vector lengths / matrix shapes do not satisfy an operation's
// preconditions.
struct dimension_error : std::invalid_argument {
    explicit dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown for invalid parameter values (negative thresholds, bad loss
// parameters, malformed configs, ...). The CLI maps this to exit code 2.
struct config_error : std::invalid_argument {
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown when the two-phase predict/observe protocol is violated.
struct protocol_error : std::logic_error {
    explicit protocol_error(const std::string& what) : std::logic_error(what) {}
};

// Thrown when a generator cannot produce a sequence satisfying its declared
// class (e.g. a Sobolev radius that forces the sup norm above B).
struct generation_error : std::runtime_error {
    explicit generation_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace adavaw
