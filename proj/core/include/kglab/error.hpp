#pragma once

#include <stdexcept>
#include <string>

namespace kglab {

/// Raised when an argument violates a documented precondition. The CLI maps
/// this family to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised on file-system failures. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace kglab
