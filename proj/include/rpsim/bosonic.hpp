#pragma once

#include "rpsim/channel.hpp"
#include "rpsim/observables.hpp"
#include "rpsim/state.hpp"

namespace rpsim {

/// Two independent thermal bosonic baths acting on the electron spins.
/// m_b = gamma_e B >= 0 (rad/ns; the electron's negative gyromagnetic ratio
/// absorbed in the sign), x = eps_s / eps_T = 2 hbar m_b / (k_B T) evaluated
/// with CODATA 2018 constants, N = 1 / (e^x - 1), s = N / (2N + 1),
/// gamma = 2 m_b kappa0 (2N + 1) in ns^-1.
struct BathParams {
  double temperature_K = 1.0;
  double kappa0 = 1.0;
  double field_mT = 1.0;

  void validate() const;
  double m_b() const;
  double energy_ratio() const;
  double occupation() const;
  double s() const;
  double gamma() const;
};

/// alpha_t = (1-s) e^{-2 gamma t} + s, beta_t = s e^{-2 gamma t} + (1-s), eta_t = e^{-gamma t}.
struct BosonicFactors {
  double alpha;
  double beta;
  double eta;
};
BosonicFactors bosonic_factors(const BathParams& p, double t);

/// |u><u| -> alpha |u><u| + (1-alpha) |d><d|, |d><d| -> (1-beta) |u><u| + beta |d><d|,
/// |u><d| -> e^{-2 i m_b t} eta |u><d|.
ElectronChannel bosonic_map(const BathParams& p, double t);

/// Pair state from the singlet: the X-state with a = alpha(1-beta),
/// b = [alpha beta + (1-alpha)(1-beta)] / 2, d = (1-alpha) beta, c = -eta^2 / 2.
TwoElectronState bosonic_state(const BathParams& p, double t);

/// f_s(t) = [alpha beta + (1-alpha)(1-beta) + eta^2] / 2.
double bosonic_fidelity(const BathParams& p, double t);

/// Phi = k/(k + 2 gamma) + 8 gamma^2 s(1-s) / ((k + 4 gamma)(k + 2 gamma)), k in s^-1.
double bosonic_yield(const BathParams& p, double k_per_s);

/// Large-gamma limit of dPhi/dB: -(1 - 2s) (s^2 / B) x e^x, per mT.
double bosonic_sensitivity_limit(const BathParams& p);

/// E(t) = max{0, 2(|c| - sqrt(a d))}.
double bosonic_entanglement(const BathParams& p, double t);

/// Root of 2(|c| - sqrt(a d)) = 0, ns (bracketed and bisected to 1e-12 relative).
double bosonic_entanglement_lifetime(const BathParams& p);

/// Trajectory of the pair state on the default grid for rate k.
Trajectory bosonic_trajectory(const BathParams& p, const ReencounterModel& model);

/// Relative field derivatives (1/s) ds/dB and (1/gamma) dgamma/dB, per mT.
struct RelativeDerivatives {
  double s;
  double gamma;
};
RelativeDerivatives bosonic_relative_derivatives(const BathParams& p);

/// Field in tesla at which x = ln(2 + sqrt 3), where d|Lambda|/dB changes sign.
double sensitivity_sign_change(double temperature_K);

}  // namespace rpsim
