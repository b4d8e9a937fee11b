#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace survmed {

/// Raised for inputs that violate a documented precondition or file grammar.
/// The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& what)
      : std::invalid_argument(what) {}

  ValidationError(const std::string& what, std::vector<std::string> details)
      : std::invalid_argument(what), details_(std::move(details)) {}

  const std::vector<std::string>& details() const noexcept { return details_; }

private:
  std::vector<std::string> details_;
};

} // namespace survmed
