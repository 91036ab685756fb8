#pragma once

#include <stdexcept>
#include <string>

namespace admitune {

enum class ErrorCode {
  kInvalidArgument,
  kGimbalLock,
  kCovarianceFactorization,
  kSingularInnovation,
  kScenarioConfig,
  kNotFound,
  kLogMismatch,
  kIo,
};

/// Base class for every error raised by the library. The C API maps `code()`
/// onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Euler-rate map is singular (|cos(pitch)| too small). Callers hold the
/// previous orientation command for the step.
class GimbalLockError : public Error {
 public:
  explicit GimbalLockError(const std::string& what) : Error(ErrorCode::kGimbalLock, what) {}
};

class CovarianceFactorizationError : public Error {
 public:
  explicit CovarianceFactorizationError(const std::string& what)
      : Error(ErrorCode::kCovarianceFactorization, what) {}
};

class SingularInnovationError : public Error {
 public:
  explicit SingularInnovationError(const std::string& what)
      : Error(ErrorCode::kSingularInnovation, what) {}
};

class ScenarioConfigError : public Error {
 public:
  explicit ScenarioConfigError(const std::string& what) : Error(ErrorCode::kScenarioConfig, what) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& what) : Error(ErrorCode::kNotFound, what) {}
};

class LogMismatchError : public Error {
 public:
  explicit LogMismatchError(const std::string& what) : Error(ErrorCode::kLogMismatch, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

}  // namespace admitune
