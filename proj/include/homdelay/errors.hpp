#pragma once

#include <stdexcept>
#include <string>

namespace homdelay {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes that do not match the system dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A certificate cannot be built for the requested parameters (a positivity
/// constraint fails, δ lies outside its admissible range, ...).
class CertificateError : public Error {
 public:
  using Error::Error;
};

/// The simulated state left the blow-up guard.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time)
      : Error(what), time_(time) {}

  double time() const { return time_; }

 private:
  double time_;
};

/// Malformed JSON configuration or CSV request.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace homdelay
