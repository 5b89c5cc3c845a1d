#pragma once

#include <optional>
#include <vector>

#include "rpsim/control.hpp"
#include "rpsim/field.hpp"
#include "rpsim/radical.hpp"
#include "rpsim/state.hpp"
#include "rpsim/types.hpp"

namespace rpsim {

/// Dense model of both radicals with their baths, factor order
/// (electron 1, bath 1, electron 2, bath 2). Meant for small systems only.
class JointSpace {
 public:
  JointSpace(RadicalSpec radical1, RadicalSpec radical2, std::size_t dimension_cap = 256);

  std::size_t dim() const { return dim_; }
  /// H_1 (x) 1 + 1 (x) H_2 at the given field.
  CMat hamiltonian(const Vec3& field_mT) const;
  /// dH/dB along a unit direction: -gamma_e n.(S_1 + S_2).
  CMat field_derivative(const Vec3& direction) const;
  /// rho_e (x) maximally mixed baths.
  CMat initial_state(const TwoElectronState& electrons) const;
  /// Partial trace over both baths.
  TwoElectronState reduce(const CMat& rho) const;
  /// Pulse on the selected electrons.
  CMat pulse(const PulseSequence& p) const;
  /// Singlet projector on the electrons times the bath identity.
  CMat singlet_projector() const;

  /// rho(t) under a field schedule and pulse train (dense eigen-propagation).
  CMat evolve(const CMat& rho, const FieldSchedule& schedule,
              const std::optional<PulseSequence>& pulses, double t) const;

 private:
  RadicalSpec r1_, r2_;
  std::size_t m1_, m2_, dim_;
  CMat electron_op(int radical, const Mat2c& op) const;
};

/// Per-interval sensitivity L(t0, tau) = int_{t0}^{t0+tau} r_c(t) df_s/dB dt
/// with the joint state at t0 held fixed and free evolution under the static
/// field over the interval. The field derivative of exp(-iH dt) is exact
/// (divided differences in the eigenbasis); the time integral uses 24-point
/// Gauss-Legendre quadrature.
struct IntervalSensitivity {
  std::vector<double> tau;
  std::vector<double> lambda;
  double f_s_at_t0 = 0.0;
  double slope = 0.0;  // least-squares slope of log|lambda| against log tau
};

IntervalSensitivity interval_sensitivity(const JointSpace& space, const CMat& rho_t0,
                                         const Vec3& direction, double field_mT, double k_ns,
                                         double t0, const std::vector<double>& taus);

/// Least-squares slope of log|y| against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rpsim
