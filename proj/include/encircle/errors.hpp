#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace encircle {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CollinearInput : Error {
  using Error::Error;
};

struct SizeMismatch : Error {
  using Error::Error;
};

struct UnsupportedSize : Error {
  using Error::Error;
};

struct TieBreak : Error {
  using Error::Error;
};

// Two connected active agents coincide, or a passive agent sits on the
// active centroid. When raised during integration, `time` carries the
// simulated time of the violation.
struct SingularState : Error {
  explicit SingularState(const std::string& msg) : Error(msg) {}
  SingularState(const std::string& msg, double t) : Error(msg), time(t) {}
  std::optional<double> time;
};

struct NotSymmetric : Error {
  using Error::Error;
};

struct InvalidRotation : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace encircle
