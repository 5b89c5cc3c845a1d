#include "rpsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <Eigen/SVD>

#include "rpsim/errors.hpp"
#include "rpsim/units.hpp"

namespace rpsim {

double ReencounterModel::rate_per_ns() const { return units::per_second_to_per_ns(rate_per_s); }

double ReencounterModel::density(double t_ns) const {
  const double k = rate_per_ns();
  return k * std::exp(-k * t_ns);
}

double ReencounterModel::t_max() const { return std::log(1e6) / rate_per_ns(); }

void ReencounterModel::validate() const {
  if (!(rate_per_s > 0.0) || !std::isfinite(rate_per_s))
    throw ConfigError("re-encounter rate k must be positive");
}

Trajectory Trajectory::from_states(std::vector<double> times,
                                   std::vector<TwoElectronState> states) {
  if (times.size() != states.size()) throw ConfigError("times and states differ in length");
  Trajectory t;
  t.times = std::move(times);
  t.states = std::move(states);
  t.f_s.reserve(t.states.size());
  t.E.reserve(t.states.size());
  for (const auto& s : t.states) {
    t.f_s.push_back(singlet_fidelity(s));
    t.E.push_back(concurrence(s));
  }
  return t;
}

double Trajectory::dt() const {
  if (times.size() < 2) throw ConfigError("trajectory needs at least two points");
  return times[1] - times[0];
}

double singlet_fidelity(const TwoElectronState& rho) {
  const double f = (singlet_projector() * rho.rho).trace().real();
  return std::clamp(f, 0.0, 1.0);
}

double concurrence(const TwoElectronState& rho) {
  Eigen::SelfAdjointEigenSolver<Mat4c> es(rho.rho);
  Eigen::Vector4d ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-10) {
    std::ostringstream os;
    os << "state has negative eigenvalue " << ev.minCoeff();
    throw InvariantError(os.str());
  }
  ev = ev.cwiseMax(0.0);
  // rho = F F^+; the lambda_i are the singular values of F^T (Y (x) Y) F
  const Mat4c f = es.eigenvectors() * ev.cwiseSqrt().cast<cplx>().asDiagonal();
  Mat4c yy = Mat4c::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Mat4c tau = f.transpose() * yy * f;
  Eigen::JacobiSVD<Mat4c> svd(tau);
  std::array<double, 4> l;
  for (int i = 0; i < 4; ++i) l[i] = svd.singularValues()(i);
  std::sort(l.begin(), l.end(), std::greater<>());
  return std::clamp(l[0] - l[1] - l[2] - l[3], 0.0, 1.0);
}

double entanglement_lower_bound(double f_s) { return std::max(0.0, 2.0 * f_s - 1.0); }

namespace {

double trapezoid(const std::vector<double>& w, double dt, std::size_t stride) {
  const std::size_t n = (w.size() - 1) / stride;
  double s = 0.5 * (w.front() + w[n * stride]);
  for (std::size_t j = 1; j < n; ++j) s += w[j * stride];
  return s * dt * static_cast<double>(stride);
}

}  // namespace

QuadratureResult reencounter_integral(const std::vector<double>& g, double dt,
                                      const ReencounterModel& model) {
  model.validate();
  if (g.size() < 3) throw ConfigError("quadrature needs at least three samples");
  const std::size_t n = g.size() - 1;
  const double t_end = dt * static_cast<double>(n);
  if (t_end < model.t_max() * (1.0 - 1e-9)) {
    std::ostringstream os;
    os << "trajectory covers " << t_end << " ns but the yield needs " << model.t_max() << " ns";
    throw ConfigError(os.str());
  }
  std::vector<double> w(g.size());
  for (std::size_t j = 0; j <= n; ++j) w[j] = model.density(dt * static_cast<double>(j)) * g[j];
  const double tail = g.back() * std::exp(-model.rate_per_ns() * t_end);
  QuadratureResult q;
  const double th = trapezoid(w, dt, 1);
  if (n % 4 == 0) {
    const double t2 = trapezoid(w, dt, 2);
    const double t4 = trapezoid(w, dt, 4);
    const double rh = (4.0 * th - t2) / 3.0;
    const double r2 = (4.0 * t2 - t4) / 3.0;
    q.value = rh + tail;
    q.error_estimate = std::abs(rh - r2) / 15.0;
  } else if (n % 2 == 0) {
    const double t2 = trapezoid(w, dt, 2);
    q.value = (4.0 * th - t2) / 3.0 + tail;
    q.error_estimate = std::abs(th - t2) / 3.0;
  } else {
    q.value = th + tail;
    q.error_estimate = std::numeric_limits<double>::quiet_NaN();
  }
  return q;
}

QuadratureResult singlet_yield(const Trajectory& traj, const ReencounterModel& model) {
  return reencounter_integral(traj.f_s, traj.dt(), model);
}

QuadratureResult effective_entanglement(const Trajectory& traj, const ReencounterModel& model) {
  return reencounter_integral(traj.E, traj.dt(), model);
}

double entanglement_lifetime(const Trajectory& traj) {
  const auto& e = traj.E;
  if (e.empty()) throw ConfigError("empty trajectory");
  if (e.back() > kEntanglementEpsilon) {
    std::ostringstream os;
    os << "concurrence is still " << e.back() << " at t = " << traj.times.back()
       << " ns; extend the trajectory";
    throw ConvergenceError(os.str());
  }
  std::size_t last = e.size();
  for (std::size_t j = e.size(); j-- > 0;)
    if (e[j] > kEntanglementEpsilon) {
      last = j;
      break;
    }
  if (last == e.size()) return 0.0;
  double lo = traj.times[last];
  double hi = traj.times[last + 1];
  if (!traj.evaluator) return lo;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    if (concurrence(traj.evaluator(mid)) > kEntanglementEpsilon)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::map<std::string, std::string>& metadata) {
  for (const auto& [k, v] : metadata) os << "# " << k << ": " << v << "\n";
  os << "t,f_s,E,epsilon_bound\n";
  os << std::setprecision(12);
  for (std::size_t j = 0; j < traj.times.size(); ++j)
    os << traj.times[j] << "," << traj.f_s[j] << "," << traj.E[j] << ","
       << entanglement_lower_bound(traj.f_s[j]) << "\n";
}

}  // namespace rpsim
