#pragma once

#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "rpsim/state.hpp"

namespace rpsim {

/// r_c(t) = k exp(-k t), k given in s^-1.
struct ReencounterModel {
  double rate_per_s = 5.8e8;

  double rate_per_ns() const;
  double density(double t_ns) const;
  /// ln(1e6) / k: beyond this the neglected yield is at most 1e-6.
  double t_max() const;
  void validate() const;
};

/// Two-electron states on a uniform grid starting at t = 0.
struct Trajectory {
  std::vector<double> times;
  std::vector<TwoElectronState> states;
  std::vector<double> f_s;
  std::vector<double> E;
  /// Optional exact evaluation at arbitrary times, used to refine lifetimes.
  std::function<TwoElectronState(double)> evaluator;

  static Trajectory from_states(std::vector<double> times, std::vector<TwoElectronState> states);
  double dt() const;
};

double singlet_fidelity(const TwoElectronState& rho);

/// Wootters concurrence max{0, l1 - l2 - l3 - l4}, l_i the square roots of the
/// eigenvalues of rho rho~, rho~ = (Y (x) Y) rho* (Y (x) Y), computed as
/// singular values of F^T (Y (x) Y) F with rho = F F^+.
double concurrence(const TwoElectronState& rho);

/// max(0, 2 f_s - 1).
double entanglement_lower_bound(double f_s);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// int_0^inf r_c(t) g(t) dt from samples g_n = g(n dt), n = 0..N, with the
/// grid reaching t_max. Trapezoid sums on h, 2h and 4h are Richardson
/// extrapolated (N divisible by 4), the tail g_N exp(-k t_N) is added and the
/// error estimate is |R_h - R_2h| / 15. For N even but not divisible by 4 the
/// error estimate is |T_h - T_2h| / 3.
QuadratureResult reencounter_integral(const std::vector<double>& g, double dt,
                                      const ReencounterModel& model);

QuadratureResult singlet_yield(const Trajectory& traj, const ReencounterModel& model);
QuadratureResult effective_entanglement(const Trajectory& traj, const ReencounterModel& model);

/// Concurrence threshold below which a state counts as unentangled.
inline constexpr double kEntanglementEpsilon = 1e-8;

/// Last time with E > 1e-8, refined by bisection to 1e-3 ns when the
/// trajectory carries an evaluator. Returns 0 when E never exceeds the
/// threshold; throws ConvergenceError if E is still positive at the end.
double entanglement_lifetime(const Trajectory& traj);

/// Columns t, f_s, E, epsilon_bound after '#' metadata lines.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::map<std::string, std::string>& metadata = {});

}  // namespace rpsim
