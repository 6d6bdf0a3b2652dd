#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace morselab {

enum class Errc {
  InvalidArgument,
  Disconnected,
  IsolatedVertex,
  SigmaTouchesBoundary,
  LineOutsideDomain,
  SignChangeWithoutSeparator,
  FaceAlreadyLabeled,
  UnpairedFace,
  PeriodicMapPresent,
  PeriodicMapMissing,
  InvalidPartition,
  Indeterminate,
  ASingular,
  Singular,
  NonConvergence,
  EmptyInterface,
  NotSimple,
  AllZero,
  Config,
  InvariantViolation,
};

std::string_view to_string(Errc code);

// All library failures surface as this type; `code()` identifies the
// precondition or numerical condition that was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace morselab
