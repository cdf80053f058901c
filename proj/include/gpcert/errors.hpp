#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpcert {

// Invalid configuration or API misuse detected while setting up objects.
// CLI exit code: 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed textual input (words, boxes, fractions, …). Carries the byte
// offset of the offending position. CLI exit code: 2.
struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
};

// The requested construction falls outside the supported structure classes;
// nothing is wrong with the input per se. CLI exit code: 3.
struct RefusalError : std::runtime_error {
  explicit RefusalError(const std::string& msg) : std::runtime_error(msg) {}
};

// A search or enumeration exceeded its configured resource cap. CLI exit
// code: 4.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

// A certificate, transcript, or constructed object failed re-verification.
// CLI exit code: 5.
struct VerificationError : std::runtime_error {
  explicit VerificationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gpcert
