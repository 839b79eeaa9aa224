#pragma once

#include <stdexcept>
#include <string>

namespace latrev {

enum class ErrorKind {
  InvalidInput,
  Convergence,
  Regime,
  Singular,
  NumericalFailure,
  Extraction,
  Validation,
  Assertion,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit code for an error kind: 2 validation, 3 numerical failure,
// 4 assertion failure, 1 everything else.
int exit_code(ErrorKind kind) noexcept;

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace latrev
