#pragma once

#include <stdexcept>
#include <string>

namespace sqcsef {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclass to a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual int exit_code() const noexcept = 0;
};

/// Invalid or inconsistent configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

/// Input data failed validation: unreadable file, bad cell, too few rows,
/// constant column, malformed partition (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 3; }
};

/// Numerical failure: out-of-domain argument, singular matrix, degenerate
/// clustering, divergent training (exit code 4).
class NumericError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 4; }
};

/// Pipeline failure tagged with the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause);
  [[nodiscard]] int exit_code() const noexcept override { return code_; }
  [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
  int code_;
};

}  // namespace sqcsef
