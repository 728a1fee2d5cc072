#pragma once

#include <stdexcept>
#include <string>

namespace svdrive {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class SingularParameter : public Error {
 public:
  using Error::Error;
};

class InvalidWindow : public Error {
 public:
  using Error::Error;
};

class UndefinedThd : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised when a state derivative turns non-finite; carries the stage time.
class IntegrationDiverged : public Error {
 public:
  explicit IntegrationDiverged(double t)
      : Error("integration diverged at t = " + std::to_string(t) + " s"), time_(t) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace svdrive
