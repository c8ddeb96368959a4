#pragma once

#include <stdexcept>
#include <string>

namespace nbwalk {

/// Malformed input: bad family parameters, unreadable graph files, bad configs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A resource guard (ball size, census budget, trial cap) refused the request.
class ResourceGuardError : public std::runtime_error {
 public:
  ResourceGuardError(std::string guard, const std::string& what)
      : std::runtime_error(guard + ": " + what), guard_(std::move(guard)) {}

  const std::string& guard() const noexcept { return guard_; }

 private:
  std::string guard_;
};

/// A walk reached a vertex where no admissible dart exists.
class StuckWalkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nbwalk
