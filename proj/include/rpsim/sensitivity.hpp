#pragma once

#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "rpsim/pair_model.hpp"

namespace rpsim {

struct DerivativeResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double step = 0.0;
  bool converged = false;
};

/// Central difference (f(x+h) - f(x-h)) / 2h, compared with step h/2; the step
/// is halved (at most 3 times) until successive values agree within
/// rel_tol * |D| + abs_tol. Returns the finer estimate.
DerivativeResult differentiate(const std::function<double(double)>& f, double x, double h,
                               double rel_tol = 0.01, double abs_tol = 1e-7);

/// dW/dB of the yield functional, so Lambda(rho) = sum_ij r_ij dW_ij for any
/// initial state. The convergence check uses the largest entry.
struct ResponseDerivative {
  Mat4 value = Mat4::Zero();
  double error_estimate = 0.0;
  double step = 0.0;
  bool converged = false;

  double sensitivity(const TwoElectronState& rho) const;
};

inline constexpr double kDefaultFieldStep = 0.01;  // mT

ResponseDerivative response_derivative(const RadicalPairSetup& setup, double field_mT,
                                       double h = kDefaultFieldStep);

/// Lambda = dPhi_s/dB for the setup's initial state.
DerivativeResult field_sensitivity(const RadicalPairSetup& setup, double field_mT,
                                   double h = kDefaultFieldStep);

/// Phi_E for the setup's initial state.
QuadratureResult pair_effective_entanglement(const RadicalPairSetup& setup, double field_mT,
                                             const std::optional<UniformGrid>& grid = std::nullopt);

/// Lambda_E = dPhi_E/dB.
DerivativeResult entanglement_sensitivity(const RadicalPairSetup& setup, double field_mT,
                                          double h = kDefaultFieldStep);

/// T_E for the setup's initial state; +infinity when entanglement outlives the grid.
double pair_entanglement_lifetime(const RadicalPairSetup& setup, double field_mT);

enum class SweepAxis { field, theta };

struct SweepResult {
  SweepAxis axis = SweepAxis::field;
  std::vector<double> grid;
  /// Series keyed by quantity: Phi_s, Lambda, Phi_E, Lambda_E, T_E.
  std::map<std::string, std::vector<double>> values;
  std::map<std::string, std::string> metadata;

  /// Throws InvariantError unless the grid ascends strictly and every value is
  /// finite (T_E may be +infinity).
  void validate() const;
};

struct SweepQuantities {
  bool yield = true;
  bool lambda = false;
  bool phi_e = false;
  bool lambda_e = false;
  bool lifetime = false;
};

/// Parallel map over field values.
SweepResult field_sweep(const RadicalPairSetup& setup, const std::vector<double>& fields,
                        const SweepQuantities& what, double h = kDefaultFieldStep);

/// Phi_s(theta) at fixed B with phi = 0 and the protocol applied per point.
SweepResult angular_sweep(const RadicalPairSetup& setup, double field_mT,
                          const std::vector<double>& thetas);

/// (max - min) / (max + min).
double visibility(const std::vector<double>& values);
double visibility(const SweepResult& sweep);

/// Default angular grid: 49 points on [0, pi].
std::vector<double> default_theta_grid(std::size_t n = 49);

/// Adjacent grid points where a quantity grows by at least `threshold` (relative).
struct Jump {
  double x_before = 0.0;
  double x_after = 0.0;
  double before = 0.0;
  double after = 0.0;
};
std::vector<Jump> detect_jumps(const std::vector<double>& grid, const std::vector<double>& values,
                               double threshold = 0.5);

/// T_E over a field grid.
SweepResult lifetime_scan(const RadicalPairSetup& setup, const std::vector<double>& fields);

/// Lambda(B, t): field derivative of the yield accumulated up to each grid time.
struct AccumulatedSensitivity {
  std::vector<double> times;
  std::vector<double> lambda;
};
AccumulatedSensitivity accumulated_sensitivity(const RadicalPairSetup& setup, double field_mT,
                                               double h = kDefaultFieldStep);

/// Earliest t from which |Lambda(B, t) - Lambda(B, inf)| <= 0.02 |Lambda(B, inf)|,
/// with Lambda(B, t) the field derivative of the yield accumulated up to t.
double reaction_time(const RadicalPairSetup& setup, double field_mT,
                     double h = kDefaultFieldStep);

/// CSV with '#' metadata lines, then x and one column per quantity.
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

}  // namespace rpsim
