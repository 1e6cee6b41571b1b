#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ptori {

enum class ExitCode : int {
  ok = 0,
  config = 2,
  hypothesis = 3,
  small_divisor = 4,
  diagnostic = 5,
  internal = 1,
};

// Base error. kind is a short machine tag, code is the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, ExitCode code, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)), code_(code) {}
  const std::string& kind() const { return kind_; }
  ExitCode code() const { return code_; }

 private:
  std::string kind_;
  ExitCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error("ConfigError", ExitCode::config, what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what)
      : Error("DimensionMismatch", ExitCode::internal, what) {}
};

class HypothesisError : public Error {
 public:
  HypothesisError(std::string kind, const std::string& what)
      : Error(std::move(kind), ExitCode::hypothesis, what) {}
};

class SmallDivisorUnderflow : public Error {
 public:
  SmallDivisorUnderflow(std::vector<int> mode, double magnitude, const std::string& what)
      : Error("SmallDivisorUnderflow", ExitCode::small_divisor, what),
        mode_(std::move(mode)),
        magnitude_(magnitude) {}
  const std::vector<int>& mode() const { return mode_; }
  double magnitude() const { return magnitude_; }

 private:
  std::vector<int> mode_;
  double magnitude_;
};

class NonZeroAverage : public Error {
 public:
  explicit NonZeroAverage(const std::string& what)
      : Error("NonZeroAverage", ExitCode::internal, what) {}
};

class DiagnosticError : public Error {
 public:
  DiagnosticError(std::string kind, const std::string& what)
      : Error(std::move(kind), ExitCode::diagnostic, what) {}
};

}  // namespace ptori
