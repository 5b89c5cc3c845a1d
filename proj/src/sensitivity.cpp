#include "rpsim/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "rpsim/errors.hpp"
#include "rpsim/units.hpp"

namespace rpsim {

namespace {

template <class T, class Eval, class Norm>
void derivative_loop(Eval&& eval, Norm&& norm, double x, double h, double rel_tol,
                     double abs_tol, T& value, double& err, double& step, bool& converged) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  if (x - h < 0.0) throw ConfigError("finite-difference stencil would reach a negative field");
  auto central = [&](double hh) { return T((eval(x + hh) - eval(x - hh)) / (2.0 * hh)); };
  T coarse = central(h);
  for (int halving = 1; halving <= 4; ++halving) {
    const double hh = h / std::pow(2.0, halving);
    T fine = central(hh);
    const double diff = norm(T(fine - coarse));
    value = fine;
    err = diff / 3.0;
    step = hh;
    if (diff <= rel_tol * norm(fine) + abs_tol) {
      converged = true;
      return;
    }
    coarse = fine;
  }
  converged = false;
}

}  // namespace

DerivativeResult differentiate(const std::function<double(double)>& f, double x, double h,
                               double rel_tol, double abs_tol) {
  DerivativeResult r;
  derivative_loop<double>(f, [](double v) { return std::abs(v); }, x, h, rel_tol, abs_tol,
                          r.value, r.error_estimate, r.step, r.converged);
  return r;
}

double ResponseDerivative::sensitivity(const TwoElectronState& rho) const {
  return (rho.pauli().array() * value.array()).sum();
}

ResponseDerivative response_derivative(const RadicalPairSetup& setup, double field_mT,
                                       double h) {
  const UniformGrid grid = default_grid(setup, field_mT + h);
  ResponseDerivative r;
  derivative_loop<Mat4>([&](double b) { return yield_response(setup, b, grid).w; },
                        [](const Mat4& m) { return m.cwiseAbs().maxCoeff(); }, field_mT, h, 0.01,
                        1e-7, r.value, r.error_estimate, r.step, r.converged);
  return r;
}

DerivativeResult field_sensitivity(const RadicalPairSetup& setup, double field_mT, double h) {
  const UniformGrid grid = default_grid(setup, field_mT + h);
  return differentiate(
      [&](double b) { return yield_response(setup, b, grid).yield(setup.initial); }, field_mT, h);
}

QuadratureResult pair_effective_entanglement(const RadicalPairSetup& setup, double field_mT,
                                             const std::optional<UniformGrid>& grid) {
  const auto traj = pair_trajectory(setup, field_mT, setup.initial, grid);
  return effective_entanglement(traj, setup.reencounter);
}

DerivativeResult entanglement_sensitivity(const RadicalPairSetup& setup, double field_mT,
                                          double h) {
  const UniformGrid grid = default_grid(setup, field_mT + h);
  return differentiate(
      [&](double b) { return pair_effective_entanglement(setup, b, grid).value; }, field_mT, h);
}

double pair_entanglement_lifetime(const RadicalPairSetup& setup, double field_mT) {
  const auto traj = pair_trajectory(setup, field_mT, setup.initial);
  try {
    return entanglement_lifetime(traj);
  } catch (const ConvergenceError&) {
    return std::numeric_limits<double>::infinity();
  }
}

void SweepResult::validate() const {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvariantError("sweep grid is not strictly ascending");
  for (const auto& [k, v] : values) {
    if (v.size() != grid.size()) throw InvariantError("sweep series " + k + " has wrong length");
    for (double x : v)
      if (std::isnan(x) || (k != "T_E" && !std::isfinite(x)))
        throw InvariantError("sweep series " + k + " has a non-finite value");
  }
}

SweepResult field_sweep(const RadicalPairSetup& setup, const std::vector<double>& fields,
                        const SweepQuantities& what, double h) {
  SweepResult out;
  out.axis = SweepAxis::field;
  out.grid = fields;
  const std::size_t n = fields.size();
  std::vector<double> phi(n), lam(n), phie(n), lame(n), te(n);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    const double b = fields[i];
    if (what.yield) phi[i] = pair_singlet_yield(setup, b).value;
    if (what.lambda) lam[i] = field_sensitivity(setup, b, h).value;
    if (what.phi_e) phie[i] = pair_effective_entanglement(setup, b).value;
    if (what.lambda_e) lame[i] = entanglement_sensitivity(setup, b, h).value;
    if (what.lifetime) te[i] = pair_entanglement_lifetime(setup, b);
  }
  if (what.yield) out.values["Phi_s"] = phi;
  if (what.lambda) out.values["Lambda"] = lam;
  if (what.phi_e) out.values["Phi_E"] = phie;
  if (what.lambda_e) out.values["Lambda_E"] = lame;
  if (what.lifetime) out.values["T_E"] = te;
  out.metadata["protocol"] = setup.protocol.name;
  out.metadata["k_per_s"] = std::to_string(setup.reencounter.rate_per_s);
  out.validate();
  return out;
}

SweepResult angular_sweep(const RadicalPairSetup& setup, double field_mT,
                          const std::vector<double>& thetas) {
  SweepResult out;
  out.axis = SweepAxis::theta;
  out.grid = thetas;
  std::vector<double> phi(thetas.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    RadicalPairSetup s = setup;
    s.theta = thetas[i];
    s.phi = 0.0;
    phi[i] = pair_singlet_yield(s, field_mT).value;
  }
  out.values["Phi_s"] = phi;
  out.metadata["protocol"] = setup.protocol.name;
  if (setup.radical1.isotropic() && setup.radical2.isotropic())
    out.metadata["warning"] = "isotropic couplings; the angular curve is flat";
  out.validate();
  return out;
}

double visibility(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi + *lo == 0.0) return 0.0;
  return (*hi - *lo) / (*hi + *lo);
}

double visibility(const SweepResult& sweep) {
  if (sweep.axis != SweepAxis::theta) throw ConfigError("visibility needs an angular sweep");
  return visibility(sweep.values.at("Phi_s"));
}

std::vector<double> default_theta_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = units::kPi * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

std::vector<Jump> detect_jumps(const std::vector<double>& grid, const std::vector<double>& values,
                               double threshold) {
  std::vector<Jump> out;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double a = values[i - 1], b = values[i];
    if (!std::isfinite(a) || !std::isfinite(b) || a <= 0.0) continue;
    if (b >= (1.0 + threshold) * a) out.push_back({grid[i - 1], grid[i], a, b});
  }
  return out;
}

SweepResult lifetime_scan(const RadicalPairSetup& setup, const std::vector<double>& fields) {
  SweepQuantities q;
  q.yield = false;
  q.lifetime = true;
  return field_sweep(setup, fields, q);
}

AccumulatedSensitivity accumulated_sensitivity(const RadicalPairSetup& setup, double field_mT,
                                               double h) {
  const UniformGrid grid = default_grid(setup, field_mT + h);
  auto cumulative = [&](double b) {
    const auto traj = pair_trajectory(setup, b, setup.initial, grid);
    std::vector<double> c(traj.f_s.size(), 0.0);
    for (std::size_t j = 1; j < c.size(); ++j) {
      const double t0 = traj.times[j - 1], t1 = traj.times[j];
      c[j] = c[j - 1] + 0.5 * (t1 - t0) *
                            (setup.reencounter.density(t0) * traj.f_s[j - 1] +
                             setup.reencounter.density(t1) * traj.f_s[j]);
    }
    return c;
  };
  const auto up = cumulative(field_mT + h);
  const auto down = cumulative(field_mT - h);
  AccumulatedSensitivity out;
  out.times = grid.times();
  out.lambda.resize(up.size());
  for (std::size_t j = 0; j < up.size(); ++j) out.lambda[j] = (up[j] - down[j]) / (2.0 * h);
  return out;
}

double reaction_time(const RadicalPairSetup& setup, double field_mT, double h) {
  const auto acc = accumulated_sensitivity(setup, field_mT, h);
  const auto& lam = acc.lambda;
  const double final_value = lam.back();
  const double tol = 0.02 * std::abs(final_value);
  std::size_t first = lam.size() - 1;
  for (std::size_t j = lam.size(); j-- > 0;) {
    if (std::abs(lam[j] - final_value) > tol) break;
    first = j;
  }
  return acc.times[first];
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  for (const auto& [k, v] : sweep.metadata) os << "# " << k << ": " << v << "\n";
  os << (sweep.axis == SweepAxis::field ? "B_mT" : "theta_rad");
  for (const auto& [k, v] : sweep.values) os << "," << k;
  os << "\n" << std::setprecision(12);
  for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
    os << sweep.grid[i];
    for (const auto& [k, v] : sweep.values) os << "," << v[i];
    os << "\n";
  }
}

}  // namespace rpsim
