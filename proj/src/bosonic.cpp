#include "rpsim/bosonic.hpp"

#include <cmath>

#include "rpsim/errors.hpp"
#include "rpsim/units.hpp"

namespace rpsim {

namespace {

double energy_ratio_per_tesla(double temperature_K) {
  using namespace units::codata2018;
  return 2.0 * kHbar * units::gamma_e_si() / (kBoltzmann * temperature_K);
}

}  // namespace

void BathParams::validate() const {
  if (!(temperature_K > 0.0)) throw ConfigError("bath temperature must be positive");
  if (!(kappa0 > 0.0)) throw ConfigError("bath coupling kappa0 must be positive");
  if (!(field_mT > 0.0)) throw ConfigError("the bosonic model needs a positive field");
}

double BathParams::m_b() const { return units::kGammaE * field_mT; }

double BathParams::energy_ratio() const {
  return energy_ratio_per_tesla(temperature_K) * field_mT * 1e-3;
}

double BathParams::occupation() const { return 1.0 / std::expm1(energy_ratio()); }

double BathParams::s() const {
  const double n = occupation();
  return n / (2.0 * n + 1.0);
}

double BathParams::gamma() const { return 2.0 * m_b() * kappa0 * (2.0 * occupation() + 1.0); }

BosonicFactors bosonic_factors(const BathParams& p, double t) {
  const double s = p.s();
  const double e2 = std::exp(-2.0 * p.gamma() * t);
  return {(1.0 - s) * e2 + s, s * e2 + (1.0 - s), std::exp(-p.gamma() * t)};
}

ElectronChannel bosonic_map(const BathParams& p, double t) {
  p.validate();
  if (t < 0.0) throw ConfigError("time must be non-negative");
  const auto f = bosonic_factors(p, t);
  Mat4c s = Mat4c::Zero();
  // S(c*2+c', a*2+b) = Xi(|a><b|)_{cc'}
  s(0, 0) = f.alpha;
  s(3, 0) = 1.0 - f.alpha;
  s(0, 3) = 1.0 - f.beta;
  s(3, 3) = f.beta;
  const cplx ph = std::exp(cplx{0.0, -2.0 * p.m_b() * t});
  s(1, 1) = f.eta * ph;
  s(2, 2) = f.eta * std::conj(ph);
  return ElectronChannel::from_superoperator(s, t);
}

TwoElectronState bosonic_state(const BathParams& p, double t) {
  const auto f = bosonic_factors(p, t);
  TwoElectronState st;
  st.rho(0, 0) = f.alpha * (1.0 - f.beta);
  st.rho(1, 1) = st.rho(2, 2) = 0.5 * (f.alpha * f.beta + (1.0 - f.alpha) * (1.0 - f.beta));
  st.rho(3, 3) = (1.0 - f.alpha) * f.beta;
  st.rho(1, 2) = st.rho(2, 1) = -0.5 * f.eta * f.eta;
  return st;
}

double bosonic_fidelity(const BathParams& p, double t) {
  const auto f = bosonic_factors(p, t);
  return 0.5 * (f.alpha * f.beta + (1.0 - f.alpha) * (1.0 - f.beta) + f.eta * f.eta);
}

double bosonic_yield(const BathParams& p, double k_per_s) {
  p.validate();
  if (!(k_per_s > 0.0)) throw ConfigError("re-encounter rate must be positive");
  const double k = units::per_second_to_per_ns(k_per_s);
  const double g = p.gamma();
  const double s = p.s();
  return k / (k + 2.0 * g) + 8.0 * g * g * s * (1.0 - s) / ((k + 4.0 * g) * (k + 2.0 * g));
}

double bosonic_sensitivity_limit(const BathParams& p) {
  p.validate();
  const double s = p.s();
  const double x = p.energy_ratio();
  return -(1.0 - 2.0 * s) * s * s / p.field_mT * x * std::exp(x);
}

double bosonic_entanglement(const BathParams& p, double t) {
  const auto f = bosonic_factors(p, t);
  const double a = f.alpha * (1.0 - f.beta);
  const double d = (1.0 - f.alpha) * f.beta;
  return std::max(0.0, 2.0 * (0.5 * f.eta * f.eta - std::sqrt(a * d)));
}

double bosonic_entanglement_lifetime(const BathParams& p) {
  p.validate();
  auto g = [&p](double t) {
    const auto f = bosonic_factors(p, t);
    return 0.5 * f.eta * f.eta - std::sqrt(f.alpha * (1.0 - f.beta) * (1.0 - f.alpha) * f.beta);
  };
  double lo = 0.0;
  double hi = 1.0 / p.gamma();
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw ConvergenceError("bosonic entanglement does not vanish");
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Trajectory bosonic_trajectory(const BathParams& p, const ReencounterModel& model) {
  p.validate();
  model.validate();
  const double tmax = model.t_max();
  const double rate = std::max(p.gamma(), 2.0 * p.m_b());
  double dt = tmax / 2000.0;
  if (rate > 0.0) dt = std::min(dt, 0.05 / rate);
  auto steps = static_cast<std::size_t>(std::ceil(tmax / dt - 1e-9));
  steps = (steps + 3) / 4 * 4;
  std::vector<double> times(steps + 1);
  std::vector<TwoElectronState> states(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) {
    times[j] = dt * static_cast<double>(j);
    states[j] = bosonic_state(p, times[j]);
  }
  Trajectory traj = Trajectory::from_states(std::move(times), std::move(states));
  traj.evaluator = [p](double t) { return bosonic_state(p, t); };
  return traj;
}

RelativeDerivatives bosonic_relative_derivatives(const BathParams& p) {
  p.validate();
  const double x = p.energy_ratio();
  const double b = p.field_mT;
  const double s = p.s();
  return {-s / b * x * std::exp(x), (1.0 - 2.0 * x * std::exp(x) / std::expm1(2.0 * x)) / b};
}

double sensitivity_sign_change(double temperature_K) {
  if (!(temperature_K > 0.0)) throw ConfigError("temperature must be positive");
  return std::log(2.0 + std::sqrt(3.0)) / energy_ratio_per_tesla(temperature_K);
}

}  // namespace rpsim
