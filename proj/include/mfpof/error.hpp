#pragma once

#include <stdexcept>
#include <string>

namespace mfpof {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual const char* kind() const noexcept { return "error"; }
};

/// Argument outside the domain of an operation (negative distance, t > t_lf, ...).
class DomainError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "domain_error"; }
};

/// Invalid configuration or malformed input data.
class ConfigError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "config_error"; }
};

/// A model could not be evaluated, typically a Cholesky failure after jitter escalation.
class ModelError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "model_error"; }
};

}  // namespace mfpof
