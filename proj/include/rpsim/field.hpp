#pragma once

#include <optional>

#include "rpsim/types.hpp"

namespace rpsim {

/// Unit vector (sin t cos p, sin t sin p, cos t).
Vec3 direction_from_angles(double theta, double phi);

/// Piecewise-constant static field, optionally reversed every alternation period.
/// The sign is +1 on [2m tau_a, (2m+1) tau_a) and -1 otherwise; the full
/// vector is reversed.
struct FieldSchedule {
  double magnitude_mT = 0.0;
  Vec3 direction = Vec3::UnitZ();
  std::optional<double> alternation_period;  // ns

  static FieldSchedule from_angles(double magnitude_mT, double theta, double phi = 0.0,
                                   std::optional<double> alternation_period = std::nullopt);

  Vec3 vector() const { return magnitude_mT * direction; }
  int sign_at(double t) const;
  Vec3 field_at(double t) const { return sign_at(t) * vector(); }

  /// Throws ConfigError if the direction is not a unit vector or tau_a <= 0.
  void validate() const;
};

}  // namespace rpsim
