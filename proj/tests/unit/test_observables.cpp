#include <cmath>
#include <random>
#include <sstream>

#include "../oracles/oracles.hpp"
#include "doctest.h"
#include "rpsim/errors.hpp"
#include "rpsim/observables.hpp"
#include "rpsim/spin_operators.hpp"

using namespace rpsim;

namespace {

Trajectory constant_trajectory(const TwoElectronState& s, const ReencounterModel& m, std::size_t steps) {
  const double dt = m.t_max() / static_cast<double>(steps);
  std::vector<double> t(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) t[j] = dt * static_cast<double>(j);
  return Trajectory::from_states(t, std::vector<TwoElectronState>(steps + 1, s));
}

Mat2c random_unitary(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  const Vec3 n = Vec3(u(g), u(g), u(g)).normalized();
  return std::exp(kI * u(g)) * oracle::rot(n, u(g));
}

TwoElectronState random_mixed(std::mt19937_64& g) {
  std::normal_distribution<double> d;
  Mat4c a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = {d(g), d(g)};
  TwoElectronState s;
  s.rho = a * a.adjoint();
  s.rho /= s.rho.trace();
  return s;
}

TwoElectronState x_state(double a, double b1, double b2, double d, cplx c) {
  TwoElectronState s;
  s.rho(0, 0) = a;
  s.rho(1, 1) = b1;
  s.rho(2, 2) = b2;
  s.rho(3, 3) = d;
  s.rho(1, 2) = c;
  s.rho(2, 1) = std::conj(c);
  return s;
}

}  // namespace

TEST_SUITE("observables") {
  TEST_CASE("singlet fidelity of named states") {
    CHECK(singlet_fidelity(singlet_state()) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(singlet_fidelity(classical_mixture_state()) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(singlet_fidelity(triplet_zero_state())) <= 1e-15);
    CHECK(std::abs(singlet_fidelity(triplet_plus_state())) <= 1e-15);
  }

  TEST_CASE("concurrence of named and X states") {
    CHECK(concurrence(singlet_state()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(concurrence(triplet_zero_state()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(concurrence(classical_mixture_state()) <= 1e-12);
    CHECK(concurrence(x_state(0, 0.5, 0.5, 0, -0.5)) == doctest::Approx(1.0).epsilon(1e-12));
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 200; ++i) {
      double w[4] = {u(g), u(g), u(g), u(g)};
      const double tot = w[0] + w[1] + w[2] + w[3];
      for (double& x : w) x /= tot;
      const double cm = std::sqrt(w[1] * w[2]) * u(g);
      const cplx c = std::polar(cm, u(g) * 2 * M_PI);
      const double expect = std::max(0.0, 2 * (cm - std::sqrt(w[0] * w[3])));
      CHECK(std::abs(concurrence(x_state(w[0], w[1], w[2], w[3], c)) - expect) <= 1e-10);
    }
  }

  TEST_CASE("property: concurrence is invariant under local unitaries") {
    std::mt19937_64 g(11);
    for (int i = 0; i < 100; ++i) {
      const auto s = random_mixed(g);
      const Mat2c u = random_unitary(g), v = random_unitary(g);
      const Mat4c uv = oracle::kron(CMat(u), CMat(v));
      TwoElectronState r;
      r.rho = uv * s.rho * uv.adjoint();
      CHECK(std::abs(concurrence(r) - concurrence(s)) <= 1e-10);
      CHECK(concurrence(s) >= 0.0);
      CHECK(concurrence(s) <= 1.0);
    }
  }

  TEST_CASE("property: fidelity lower bound never exceeds the concurrence") {
    CHECK(entanglement_lower_bound(1.0) == 1.0);
    CHECK(entanglement_lower_bound(0.5) == 0.0);
    CHECK(entanglement_lower_bound(0.2) == 0.0);
    std::mt19937_64 g(3);
    for (int i = 0; i < 500; ++i) {
      const auto s = random_mixed(g);
      CHECK(entanglement_lower_bound(singlet_fidelity(s)) <= concurrence(s) + 1e-9);
    }
    for (int i = 0; i < 100; ++i) {
      TwoElectronState s;
      const Mat2c u = random_unitary(g), v = random_unitary(g);
      const Mat4c uv = oracle::kron(CMat(u), CMat(v));
      const double p = std::uniform_real_distribution<double>(0, 1)(g);
      s.rho = p * uv * singlet_state().rho * uv.adjoint() + (1 - p) * Mat4c::Identity() / 4.0;
      CHECK(entanglement_lower_bound(singlet_fidelity(s)) <= concurrence(s) + 1e-9);
    }
  }

  TEST_CASE("re-encounter model: normalization and t_max") {
    ReencounterModel m{5.8e8};
    CHECK(m.rate_per_ns() == doctest::Approx(0.58));
    CHECK(m.t_max() == doctest::Approx(std::log(1e6) / 0.58));
    CHECK(std::exp(-m.rate_per_ns() * m.t_max()) == doctest::Approx(1e-6));
    const double integral = oracle::integrate([&](double t) { return m.density(t); }, 0, 60, 40);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(ReencounterModel{0.0}.validate(), ConfigError);
    CHECK_THROWS_AS(ReencounterModel{-1.0}.validate(), ConfigError);
  }

  TEST_CASE("yields of constant trajectories") {
    ReencounterModel m{5.8e8};
    const auto one = constant_trajectory(singlet_state(), m, 2000);
    const auto y1 = singlet_yield(one, m);
    CHECK(y1.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(y1.error_estimate <= 1e-6);
    CHECK(effective_entanglement(one, m).value == doctest::Approx(1.0).epsilon(1e-6));
    const auto half = constant_trajectory(classical_mixture_state(), m, 2000);
    CHECK(singlet_yield(half, m).value == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::abs(effective_entanglement(half, m).value) <= 1e-12);
    CHECK(entanglement_lifetime(half) == 0.0);
    CHECK_THROWS_AS(entanglement_lifetime(one), ConvergenceError);
  }

  TEST_CASE("quadrature: Richardson error estimate and grid halving") {
    ReencounterModel m{5e7};
    auto g = [](double t) { return 0.5 + 0.5 * std::cos(0.9 * t) * std::exp(-0.05 * t); };
    const double k = m.rate_per_ns();
    // int k e^{-kt} g dt in closed form
    const cplx z(k + 0.05, -0.9);
    const double exact = 0.5 + 0.5 * k * (1.0 / z).real();
    auto run = [&](std::size_t n) {
      const double dt = m.t_max() / static_cast<double>(n);
      std::vector<double> v(n + 1);
      for (std::size_t j = 0; j <= n; ++j) v[j] = g(dt * static_cast<double>(j));
      return reencounter_integral(v, dt, m);
    };
    const auto a = run(4000), b = run(8000);
    CHECK(std::abs(a.value - exact) <= 1e-6);
    CHECK(std::abs(a.value - b.value) <= 1e-6);
    CHECK(a.error_estimate <= 1e-6);
    CHECK(std::abs(a.value - exact) <= 10 * a.error_estimate + 1e-6);
    // truncated grid is rejected
    std::vector<double> v(101, 1.0);
    CHECK_THROWS_AS(reencounter_integral(v, 0.01, m), ConfigError);
  }

  TEST_CASE("property: accumulated yield is nondecreasing and within [0, 1]") {
    ReencounterModel m{5.8e8};
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(0, 1);
    const std::size_t n = 400;
    const double dt = m.t_max() / n;
    std::vector<double> f(n + 1);
    for (double& x : f) x = u(g);
    double acc = 0.0, prev = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      acc += 0.5 * dt * (m.density(dt * (j - 1)) * f[j - 1] + m.density(dt * j) * f[j]);
      CHECK(acc >= prev);
      prev = acc;
    }
    const double y = reencounter_integral(f, dt, m).value;
    CHECK(y >= 0.0);
    CHECK(y <= 1.0);
  }

  TEST_CASE("lifetime: bisection with an evaluator") {
    ReencounterModel m{5.8e8};
    const double te = 3.21;
    auto state_at = [&](double t) {
      // Werner-like state whose concurrence reaches zero at te
      const double c = std::max(0.0, 1.0 - t / te);
      TwoElectronState s;
      s.rho = c * singlet_state().rho + (1 - c) * classical_mixture_state().rho;
      return s;
    };
    const std::size_t n = 400;
    std::vector<double> t(n + 1);
    std::vector<TwoElectronState> st(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      t[j] = m.t_max() * j / n;
      st[j] = state_at(t[j]);
    }
    auto traj = Trajectory::from_states(t, st);
    traj.evaluator = state_at;
    CHECK(std::abs(entanglement_lifetime(traj) - te) <= 1e-3);
  }

  TEST_CASE("trajectory CSV columns") {
    ReencounterModel m{5.8e8};
    const auto one = constant_trajectory(singlet_state(), m, 8);
    std::ostringstream os;
    write_trajectory_csv(os, one, {{"molecule", "none"}});
    const std::string s = os.str();
    CHECK(s.rfind("# molecule", 0) == 0);
    CHECK(s.find("t,f_s,E,epsilon_bound\n") != std::string::npos);
  }

  TEST_CASE("state validation") {
    TwoElectronState s;
    CHECK_THROWS_AS(s.validate(), InvariantError);
    s = singlet_state();
    CHECK_NOTHROW(s.validate());
    s.rho(0, 1) = 0.1;
    CHECK_THROWS_AS(s.validate(), InvariantError);
    std::mt19937_64 g(2);
    const auto r = random_mixed(g);
    CHECK((TwoElectronState::from_pauli(r.pauli()).rho - r.rho).cwiseAbs().maxCoeff() <= 1e-14);
  }
}
