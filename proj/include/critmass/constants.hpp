#pragma once

#include <numbers>

namespace critmass {

inline constexpr double kPi = std::numbers::pi;

/// Threshold mass 8*pi separating global boundedness from possible collapse.
inline constexpr double kCriticalMass = 8.0 * std::numbers::pi;

}  // namespace critmass
