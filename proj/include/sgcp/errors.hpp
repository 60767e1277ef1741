#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sgcp {

/// Input violates a documented precondition (bad sizes, mismatched graphs, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value lies outside the domain on which problem data is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configured size limit would be exceeded. Not a mathematical failure.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stored data does not match the graph it is loaded against.
class AddressMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration rejected; carries every violation found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace sgcp
