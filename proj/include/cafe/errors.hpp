#pragma once

#include <stdexcept>
#include <string>

namespace cafe {

// Invalid configuration value (bad range, unknown key, dimension mismatch
// between config and data). Messages name the offending field and bound.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// API misuse: calling an operation before its required state exists
// (missing forward cache, empty snapshot ring, observing a batch outside
// a round).
struct UsageError : std::logic_error {
  explicit UsageError(const std::string& msg) : std::logic_error(msg) {}
};

// File problems: unreadable paths, bad magic numbers, truncated payloads.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values reaching an optimizer step; aborts the run with context.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cafe
