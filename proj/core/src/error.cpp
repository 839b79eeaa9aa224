#include "latrev/error.hpp"

namespace latrev {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Regime: return "regime";
    case ErrorKind::Singular: return "singular";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::Extraction: return "extraction";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Assertion: return "assertion";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::InvalidInput:
    case ErrorKind::Regime:
    case ErrorKind::Io: return 2;
    case ErrorKind::NumericalFailure:
    case ErrorKind::Convergence:
    case ErrorKind::Singular:
    case ErrorKind::Extraction: return 3;
    case ErrorKind::Assertion: return 4;
  }
  return 4;
}

}  // namespace latrev
