#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace conefix {

/// Bad instance configuration: out-of-range constants, dimension mismatches,
/// malformed cones. Carries every problem found, not just the first.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what)
      : std::invalid_argument(what), problems_{what} {}

  explicit ConfigError(std::vector<std::string> problems)
      : std::invalid_argument(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
      if (!out.empty()) out += "; ";
      out += p;
    }
    return out;
  }

  std::vector<std::string> problems_;
};

/// A point outside the carrier, or a map that leaves it.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::string path)
      : std::runtime_error(what + ": " + path), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace conefix
