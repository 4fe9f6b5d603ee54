#pragma once

#include <stdexcept>
#include <string>

namespace radtex {

// Argument outside the mathematical domain of an operation (e.g. a disc point
// with |a| > 1, or an out-of-range bucket index).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid configuration: bad bucket resolution, malformed scene, etc.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or truncated file content.
class FormatError : public std::runtime_error {
 public:
  enum class Kind { kBadMagic, kVersion, kTruncated, kSizeMismatch, kCodec, kOther };

  FormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// File system failure (cannot open, cannot write).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace radtex
