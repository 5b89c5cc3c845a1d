#include <cmath>
#include <limits>
#include <sstream>

#include "../oracles/oracles.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "rpsim/errors.hpp"
#include "rpsim/molecules.hpp"
#include "rpsim/sensitivity.hpp"

using namespace rpsim;

namespace {

RadicalPairSetup pair(RadicalSpec a, RadicalSpec b, const std::string& protocol = "N") {
  RadicalPairSetup s;
  s.radical1 = std::move(a);
  s.radical2 = std::move(b);
  s.protocol = protocol_by_name(protocol, 0.5, 0.5);
  s.reencounter = ReencounterModel{5.8e8};
  return s;
}

double oracle_lambda(const RadicalPairSetup& s, double b, double h) {
  oracle::Joint j(s.radical1, s.radical2);
  const double k = s.reencounter.rate_per_ns();
  const Vec3 n = s.direction();
  return (oracle::joint_yield(j, s.initial, (b + h) * n, k) - oracle::joint_yield(j, s.initial, (b - h) * n, k)) /
         (2 * h);
}

Mat3 axial(double par, double perp) {
  return Vec3(perp, perp, par).asDiagonal();
}

}  // namespace

TEST_SUITE("sensitivity") {
  TEST_CASE("no hyperfine couplings: flat yield, zero sensitivities") {
    auto s = pair(testing::radical({}), testing::radical({}));
    for (double b : {0.5, 4.0}) {
      CHECK(std::abs(field_sensitivity(s, b).value) <= 1e-10);
      CHECK(std::abs(entanglement_sensitivity(s, b).value) <= 1e-10);
      CHECK(pair_entanglement_lifetime(s, b) == std::numeric_limits<double>::infinity());
    }
  }

  TEST_CASE("sensitivity equals the derivative of the joint-space yield") {
    SUBCASE("2 + 1 nuclei, 32 dimensions") {
      auto s = pair(truncate_bath(preset_py(), 2), truncate_bath(preset_dma(), 1));
      for (double b : {0.8, 2.5, 6.0}) {
        const auto d = field_sensitivity(s, b);
        CHECK(std::abs(d.value - oracle_lambda(s, b, d.step)) <= 1e-4);
      }
    }
    SUBCASE("Py-DMA 3 + 3 nuclei at 4 mT") {
      auto s = pair(truncate_bath(preset_py(), 3), truncate_bath(preset_dma(), 3));
      const auto d = field_sensitivity(s, 4.0);
      CHECK(d.converged);
      CHECK(std::abs(d.value - oracle_lambda(s, 4.0, d.step)) <= 1e-4);
    }
    SUBCASE("tilted field, anisotropic couplings") {
      std::mt19937_64 g(21);
      auto s = pair(testing::radical({testing::aniso(testing::random_symmetric(g, 1.0))}),
                    testing::radical({testing::aniso(testing::random_symmetric(g, 0.7), 3)}));
      s.theta = 1.1;
      const auto d = field_sensitivity(s, 1.7);
      CHECK(std::abs(d.value - oracle_lambda(s, 1.7, d.step)) <= 1e-4);
    }
  }

  TEST_CASE("response derivative is linear in the initial state") {
    auto s = pair(truncate_bath(preset_py(), 2), truncate_bath(preset_dma(), 2));
    const auto r = response_derivative(s, 3.0);
    const auto a = singlet_state(), b = product_state(Eigen::Vector2cd(1, 0.3), Eigen::Vector2cd(0.2, 1));
    TwoElectronState m;
    m.rho = 0.3 * a.rho + 0.7 * b.rho;
    CHECK(std::abs(r.sensitivity(m) - (0.3 * r.sensitivity(a) + 0.7 * r.sensitivity(b))) <= 1e-8);
    s.initial = a;
    CHECK(r.sensitivity(a) == doctest::Approx(field_sensitivity(s, 3.0).value).epsilon(1e-8));
  }

  TEST_CASE("classical mixture carries no entanglement, so its entanglement sensitivity vanishes") {
    auto s = pair(truncate_bath(preset_py(), 2), truncate_bath(preset_dma(), 2));
    s.initial = classical_mixture_state();
    CHECK(std::abs(entanglement_sensitivity(s, 2.0).value) <= 1e-12);
    CHECK(pair_effective_entanglement(s, 2.0).value <= 1e-12);
  }

  TEST_CASE("finite differences: exact for quadratics, stencil limits") {
    const auto d = differentiate([](double x) { return 3 * x * x - x; }, 2.0, 0.1);
    CHECK(d.value == doctest::Approx(11.0).epsilon(1e-12));
    CHECK(d.converged);
    CHECK_THROWS_AS(differentiate([](double x) { return x; }, 0.005, 0.01), ConfigError);
    CHECK_THROWS_AS(differentiate([](double x) { return x; }, 1.0, 0.0), ConfigError);
  }

  TEST_CASE("visibility arithmetic") {
    CHECK(visibility(std::vector<double>{0.2, 0.6}) == doctest::Approx(0.5));
    CHECK(visibility(std::vector<double>{0.3, 0.3, 0.3}) == 0.0);
    SweepResult f;
    f.axis = SweepAxis::field;
    CHECK_THROWS_AS(visibility(f), ConfigError);
    const auto th = default_theta_grid();
    CHECK(th.size() == 49);
    CHECK(th.front() == 0.0);
    CHECK(th.back() == doctest::Approx(M_PI));
  }

  TEST_CASE("angular sweeps: flat without anisotropy or without a field") {
    auto iso = pair(truncate_bath(preset_py(), 3), truncate_bath(preset_dma(), 2));
    const std::vector<double> th{0.0, 0.5, 1.2, 2.0, M_PI};
    const auto a = angular_sweep(iso, 2.0, th);
    const auto& ya = a.values.at("Phi_s");
    for (double y : ya) CHECK(std::abs(y - ya.front()) <= 1e-8);
    CHECK(visibility(a) <= 1e-8);

    std::mt19937_64 g(3);
    auto an = pair(testing::radical({testing::aniso(testing::random_symmetric(g, 1.0)), testing::iso(0.4)}),
                   testing::radical({}));
    const auto b = angular_sweep(an, 0.0, th);
    const auto& yb = b.values.at("Phi_s");
    for (double y : yb) CHECK(std::abs(y - yb.front()) <= 1e-8);
    // with a field the same system is not flat
    CHECK(visibility(angular_sweep(an, 1.0, th)) > 1e-4);
  }

  TEST_CASE("axially symmetric fixture: Phi_s(theta) = Phi_s(pi - theta)") {
    auto s = pair(testing::radical({testing::aniso(axial(1.4, -0.3), 3), testing::aniso(axial(-0.5, 0.2))}),
                  testing::radical({testing::aniso(axial(0.9, 0.1))}));
    const std::vector<double> th{0.2, 0.7, 1.3, M_PI - 1.3, M_PI - 0.7, M_PI - 0.2};
    const auto y = angular_sweep(s, 0.8, th).values.at("Phi_s");
    for (int i = 0; i < 3; ++i) CHECK_MESSAGE(std::abs(y[i] - y[5 - i]) <= 1e-8, y[i] << " " << y[5 - i]);
  }

  TEST_CASE("pulses along a fixed axis induce angular dependence at zero field") {
    auto mol = preset_fadh_o2_standin();
    RadicalPairSetup s;
    s.radical1 = truncate_bath(mol.radical1, 3);
    s.radical2 = mol.radical2;
    s.protocol = protocol_by_name("QC-only", 100.0, 100.0);
    s.reencounter = ReencounterModel{5e5};
    const std::vector<double> th{0.0, M_PI / 6, M_PI / 3, M_PI / 2, 2 * M_PI / 3};
    const auto v = visibility(angular_sweep(s, 0.0, th));
    MESSAGE("zero-field visibility under pulses: " << v);
    CHECK(v > 0.01);
    s.protocol = protocol_by_name("N", 100.0, 100.0);
    CHECK(visibility(angular_sweep(s, 0.0, th)) <= 1e-8);
  }

  TEST_CASE("jump detection") {
    const std::vector<double> x{3.0, 3.5, 4.0, 4.5}, y{4.0, 4.1, 7.3, 7.4};
    const auto j = detect_jumps(x, y);
    REQUIRE(j.size() == 1);
    CHECK(j[0].x_before == 3.5);
    CHECK(j[0].x_after == 4.0);
    CHECK(detect_jumps(x, {1.0, 1.2, 1.4, 1.6}).empty());
    CHECK(detect_jumps(x, {1.0, 1.5, 2.0, 2.99}).size() == 1);
  }

  TEST_CASE("sweep validation and CSV") {
    SweepResult r;
    r.grid = {1.0, 2.0, 2.0};
    CHECK_THROWS_AS(r.validate(), InvariantError);
    r.grid = {1.0, 2.0};
    r.values["Lambda"] = {0.1, std::nan("")};
    CHECK_THROWS_AS(r.validate(), InvariantError);
    r.values["Lambda"] = {0.1, 0.2};
    r.values["T_E"] = {1.0, std::numeric_limits<double>::infinity()};
    CHECK_NOTHROW(r.validate());
    r.metadata["protocol"] = "N";
    std::ostringstream os;
    write_sweep_csv(os, r);
    CHECK(os.str().find("# protocol") != std::string::npos);
    CHECK(os.str().find("B_mT,Lambda,T_E") != std::string::npos);
  }

  TEST_CASE("accumulated sensitivity saturates and defines a reaction time") {
    auto s = pair(truncate_bath(preset_py(), 2), truncate_bath(preset_dma(), 2));
    const auto acc = accumulated_sensitivity(s, 3.0);
    const double total = field_sensitivity(s, 3.0).value;
    CHECK(acc.lambda.back() == doctest::Approx(total).epsilon(0.02));
    const double tr = reaction_time(s, 3.0);
    CHECK(tr > 0.0);
    CHECK(tr < s.reencounter.t_max());
  }
}
