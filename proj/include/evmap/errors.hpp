#pragma once

#include <stdexcept>
#include <string>

namespace evmap {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DogmaticOpinion : Error { using Error::Error; };
struct BaseRateMismatch : Error { using Error::Error; };
struct SpecMismatch : Error { using Error::Error; };
struct OutOfBounds : Error { using Error::Error; };
struct BadThresholds : Error { using Error::Error; };
struct PoseOutOfBounds : Error { using Error::Error; };
struct StartBlocked : Error { using Error::Error; };
struct DegenerateWorld : Error { using Error::Error; };

/// Malformed scenario file or invalid run configuration.
struct ConfigError : Error { using Error::Error; };

}  // namespace evmap
