#pragma once

#include <stdexcept>
#include <string>

namespace fairalloc {

// Malformed input or a violated precondition. The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Input is well formed but exceeds a documented size or memory limit.
// The CLI maps it to exit code 3.
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fairalloc
