#pragma once

#include <stdexcept>
#include <string>

namespace nsn {

enum class ErrorKind {
  kSchema,
  kDimension,
  kInvalidValue,
  kIndexOutOfRange,
  kEmptyUncertaintySet,
  kInfeasibleProfile,
  kFollowerIndeterminate,
  kFollowerUnbounded,
  kNoConvergence,
  kCycling,
};

const char* to_string(ErrorKind kind);

// All library failures surface as nsn::Error; `kind()` lets callers map them
// onto exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nsn
