#include <random>

#include "../oracles/oracles.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "rpsim/channel.hpp"
#include "rpsim/errors.hpp"
#include "rpsim/molecules.hpp"
#include "rpsim/observables.hpp"
#include "rpsim/spin_operators.hpp"

using namespace rpsim;
using testing::iso;
using testing::radical;

namespace {

// Transfer matrix by brute force: M_ij = Tr[sigma_i Tr_b(U (sigma_j (x) 1/m) U^+)] / 2.
Mat4 oracle_transfer(const RadicalSpec& r, const CMat& u) {
  const auto m = u.rows() / 2;
  const auto& p = pauli_basis();
  Mat4 out;
  for (int j = 0; j < 4; ++j) {
    const CMat rho = u * oracle::kron(CMat(p[j]), oracle::eye(m) / double(m)) * u.adjoint();
    Mat2c red;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) red(a, b) = rho.block(a * m, b * m, m, m).trace();
    for (int i = 0; i < 4; ++i) out(i, j) = 0.5 * (p[i] * red).trace().real();
  }
  (void)r;
  return out;
}

CMat oracle_unitary(const RadicalSpec& r, const oracle::Schedule& s, double t) {
  oracle::Joint j(r, radical({}));
  // evolve the radical alone: reuse the joint machinery on the identity
  const CMat h = oracle::radical_hamiltonian(r, s.field);
  const CMat hm = oracle::radical_hamiltonian(r, -s.field);
  const auto m = h.rows() / 2;
  const CMat pu = oracle::kron(CMat(oracle::rot(s.pulse_axis, s.pulse_angle)), oracle::eye(m));
  std::vector<double> ev;
  for (double tau : {s.tau_c, s.tau_a})
    if (tau > 0)
      for (int k = 1; k * tau < t - 1e-12; ++k) ev.push_back(k * tau);
  std::sort(ev.begin(), ev.end());
  ev.erase(std::unique(ev.begin(), ev.end(), [](double a, double b) { return b - a < 1e-9; }), ev.end());
  ev.push_back(t);
  CMat u = oracle::eye(h.rows());
  double now = 0;
  for (double e : ev) {
    if (e - now < 1e-12 && e < t) {
    } else {
      int sign = 1;
      if (s.tau_a > 0) sign = static_cast<long>(std::floor(now / s.tau_a + 1e-9)) % 2 == 0 ? 1 : -1;
      u = oracle::expm(sign > 0 ? h : hm, e - now) * u;
      now = e;
    }
    if (s.tau_c > 0 && std::abs(e / s.tau_c - std::round(e / s.tau_c)) < 1e-9)
      u = pu * u;
  }
  (void)j;
  return u;
}

}  // namespace

TEST_SUITE("channel") {
  TEST_CASE("t = 0 gives the identity") {
    const auto ch = tomograph_channel(preset_dma(), FieldSchedule::from_angles(1.0, 0.3), std::nullopt, 0.0);
    CHECK((ch.transfer - Mat4::Identity()).cwiseAbs().maxCoeff() <= 1e-14);
  }

  TEST_CASE("bare electron: precession about z, a = 1, kappa = exp(i gamma B t)") {
    const double b = 3.0, t = 1.7;
    const auto ch = tomograph_channel(radical({}), FieldSchedule::from_angles(b, 0.0), std::nullopt, t);
    REQUIRE(ch.iso.has_value());
    CHECK(ch.iso->a == doctest::Approx(1.0).epsilon(1e-12));
    const cplx expect = std::exp(kI * units::kGammaE * b * t);
    CHECK(std::abs(ch.iso->kappa - expect) <= 1e-10);
    const double c = std::cos(units::kGammaE * b * t), sn = std::sin(units::kGammaE * b * t);
    CHECK(ch.transfer(1, 1) == doctest::Approx(c).epsilon(1e-10));
    CHECK(ch.transfer(2, 2) == doctest::Approx(c).epsilon(1e-10));
    CHECK(std::abs(std::abs(ch.transfer(2, 1)) - std::abs(sn)) <= 1e-10);
    CHECK(ch.transfer(3, 3) == doctest::Approx(1.0).epsilon(1e-12));
    const auto z = verify_zero_blocks(ch);
    CHECK(z.applicable);
    CHECK(z.pass);
    CHECK(z.max_forbidden <= 1e-15);
  }

  TEST_CASE("two isotropic nuclei at 3 ns match brute-force evolution") {
    auto r = radical({iso(0.9), iso(0.35)});
    const auto sched = FieldSchedule::from_angles(1.2, 0.0);
    const auto ch = tomograph_channel(r, sched, std::nullopt, 3.0, BathStrategy::exact(false));
    oracle::Schedule s;
    s.field = sched.vector();
    const Mat4 ref = oracle_transfer(r, oracle_unitary(r, s, 3.0));
    CHECK((ch.transfer - ref).cwiseAbs().maxCoeff() <= 1e-9);
    REQUIRE(ch.iso.has_value());
    // a_t is normalized by the bath dimension: M_zz = 2a - 1
    CHECK(ch.transfer(3, 3) == doctest::Approx(2 * ch.iso->a - 1).epsilon(1e-10));
  }

  TEST_CASE("random anisotropic radicals with pulses and alternation match brute force") {
    std::mt19937_64 g(21);
    for (int trial = 0; trial < 6; ++trial) {
      auto r = radical({testing::aniso(testing::random_symmetric(g, 1.5), 3),
                        testing::aniso(testing::random_symmetric(g, 1.5), 2), iso(0.5)});
      const auto sched = FieldSchedule::from_angles(0.5 + trial, 0.2 * trial, 0.4,
                                                    trial % 2 ? std::optional<double>(0.7) : std::nullopt);
      PulseSequence p = protocol_X(0.45);
      p.axis = direction_from_angles(1.0, 0.3 * trial);
      const double t = 2.0 + 0.5 * trial;
      const auto ch = tomograph_channel(r, sched, p, t);
      oracle::Schedule s;
      s.field = sched.vector();
      s.tau_c = 0.45;
      s.tau_a = sched.alternation_period.value_or(0.0);
      s.pulse_axis = p.axis;
      const Mat4 ref = oracle_transfer(r, oracle_unitary(r, s, t));
      CHECK((ch.transfer - ref).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK_NOTHROW(check_channel(ch));
      CHECK_FALSE(verify_zero_blocks(ch).applicable);
    }
  }

  TEST_CASE("zero-block pattern on a truncated Py radical") {
    const auto r = truncate_bath(preset_py(), 3);
    const auto sched = FieldSchedule::from_angles(4.0, 0.0);
    const auto ch = tomograph_channel(r, sched, std::nullopt, 2.0, BathStrategy::exact());
    const auto z = verify_zero_blocks(ch);
    CHECK(z.applicable);
    CHECK(z.pass);
    CHECK(z.max_forbidden <= 1e-9);
    PulseSequence half;
    half.single_shot = false;
    half.period = 100.0;
    half.start_offset = 1.0;
    half.axis = Vec3::UnitX();
    half.angle = M_PI / 2;
    const auto pulsed = tomograph_channel(r, sched, half, 2.0, BathStrategy::exact());
    CHECK_FALSE(verify_zero_blocks(pulsed).applicable);
  }

  TEST_CASE("grouping equivalent nuclei is exact") {
    const auto r = preset_py();
    const auto sched = FieldSchedule::from_angles(2.0, 0.0);
    const auto grouped = tomograph_channel(r, sched, std::nullopt, 1.5, BathStrategy::exact(true));
    const auto t5 = truncate_bath(r, 5);
    const auto g5 = tomograph_channel(t5, sched, std::nullopt, 1.5, BathStrategy::exact(true));
    const auto u5 = tomograph_channel(t5, sched, std::nullopt, 1.5, BathStrategy::exact(false));
    CHECK((g5.transfer - u5.transfer).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK_NOTHROW(check_channel(grouped));
  }

  TEST_CASE("exact bath above the cap is rejected with a hint") {
    BathStrategy b = BathStrategy::exact(false);
    b.exact_cap = 64;
    CHECK_THROWS_WITH_AS(tomograph_channel(preset_py(), FieldSchedule::from_angles(1.0, 0.0), std::nullopt, 1.0, b),
                         doctest::Contains("ampl"), ConfigError);
  }

  TEST_CASE("sampled bath: unbiased, standard error scales as n^-1/2") {
    const auto r = radical({iso(1.1), iso(0.6), iso(0.8, 3), iso(0.3)});
    const auto sched = FieldSchedule::from_angles(0.8, 0.0);
    const double t = 4.0;
    const auto exact = tomograph_channel(r, sched, std::nullopt, t, BathStrategy::exact(false));
    std::vector<double> ns{32, 128, 512}, ses;
    for (double n : ns) {
      double se = 0.0;
      const int seeds = 8;
      Mat4 mean = Mat4::Zero();
      for (int s = 0; s < seeds; ++s) {
        const auto ch = tomograph_channel(r, sched, std::nullopt, t, BathStrategy::sampled(std::size_t(n), 100 + s));
        REQUIRE(ch.standard_error.has_value());
        se += (*ch.standard_error)(3, 3) / seeds;
        mean += ch.transfer / seeds;
      }
      ses.push_back(se);
      CHECK(std::abs(mean(3, 3) - exact.transfer(3, 3)) <= 4 * se / std::sqrt(double(seeds)) + 1e-12);
    }
    const double slope = std::log(ses.back() / ses.front()) / std::log(ns.back() / ns.front());
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.2));
  }

  TEST_CASE("compose_on_pair: identity channels and complete dephasing") {
    ElectronChannel id;
    const auto s = singlet_state();
    CHECK((compose_on_pair(id, id, s).rho - s.rho).cwiseAbs().maxCoeff() <= 1e-15);
    ElectronChannel deph;
    deph.transfer = Mat4::Zero();
    deph.transfer(0, 0) = 1.0;
    deph.transfer(3, 3) = 1.0;
    CHECK((compose_on_pair(deph, deph, s).rho - classical_mixture_state().rho).cwiseAbs().maxCoeff() <= 1e-15);
    ElectronChannel later = id;
    later.time = 1.0;
    CHECK_THROWS_AS(compose_on_pair(id, later, s), ConfigError);
  }

  TEST_CASE("factorization: composed channels equal joint evolution (3+3 nuclei)") {
    const auto r1 = truncate_bath(preset_py(), 3), r2 = truncate_bath(preset_dma(), 3);
    oracle::Joint j(r1, r2);
    const auto rho0 = j.initial(singlet_state());
    oracle::Schedule s;
    s.field = Vec3(0, 0, 4.0);
    const auto ref = j.reduce(oracle::evolve(j, rho0, s, 2.0));
    const auto sched = FieldSchedule::from_angles(4.0, 0.0);
    const auto c1 = tomograph_channel(r1, sched, std::nullopt, 2.0, {}, 1);
    const auto c2 = tomograph_channel(r2, sched, std::nullopt, 2.0, {}, 2);
    const auto got = compose_on_pair(c1, c2, singlet_state());
    CHECK((got.rho - ref.rho).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(singlet_fidelity(got) == doctest::Approx(singlet_fidelity(ref)).epsilon(1e-9));
  }

  TEST_CASE("property: factorization on random small anisotropic pairs with pulses") {
    std::mt19937_64 g(33);
    for (int trial = 0; trial < 4; ++trial) {
      auto r1 = radical({testing::aniso(testing::random_symmetric(g, 1.0), 2), iso(0.7)});
      auto r2 = radical({testing::aniso(testing::random_symmetric(g, 1.0), 3)});
      oracle::Joint j(r1, r2);
      const auto sched = FieldSchedule::from_angles(1.0 + trial, 0.5 * trial, 0.0);
      oracle::Schedule s;
      s.field = sched.vector();
      s.tau_c = 0.4;
      s.pulse_axis = Vec3::UnitY();
      PulseSequence p = protocol_Z(0.4);
      p.axis = Vec3::UnitY();
      const double t = 1.3 + trial;
      std::mt19937_64 g2(trial);
      const auto e0 = product_state(Eigen::Vector2cd::Random(), Eigen::Vector2cd::Random());
      const auto ref = j.reduce(oracle::evolve(j, j.initial(e0), s, t));
      const auto got = compose_on_pair(tomograph_channel(r1, sched, p, t, {}, 1),
                                       tomograph_channel(r2, sched, p, t, {}, 2), e0);
      CHECK((got.rho - ref.rho).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK_NOTHROW(got.validate());
    }
  }
}
