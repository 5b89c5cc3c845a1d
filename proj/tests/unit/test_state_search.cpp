#include <cmath>
#include <sstream>

#include "../oracles/oracles.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "rpsim/errors.hpp"
#include "rpsim/molecules.hpp"
#include "rpsim/observables.hpp"
#include "rpsim/pair_model.hpp"
#include "rpsim/state_search.hpp"

using namespace rpsim;

namespace {

RadicalPairSetup ci_pair() {
  RadicalPairSetup s;
  s.radical1 = truncate_bath(preset_py(), 3);
  s.radical2 = truncate_bath(preset_dma(), 3);
  s.reencounter = ReencounterModel{5.8e8};
  return s;
}

}  // namespace

TEST_SUITE("state-search") {
  TEST_CASE("product samples are unentangled, incoherent samples are diagonal") {
    const auto p = sample_states({FamilyKind::product_pure, 1}, 5000);
    double worst = 0.0;
    for (const auto& s : p) {
      worst = std::max(worst, concurrence(s));
      CHECK_NOTHROW(s.validate());
    }
    CHECK(worst <= 1e-12);
    const auto inc = sample_states({FamilyKind::incoherent_diagonal, 2}, 2000);
    for (const auto& s : inc) {
      Mat4c off = s.rho;
      off.diagonal().setZero();
      CHECK(off.cwiseAbs().maxCoeff() == 0.0);
      CHECK(concurrence(s) <= 1e-12);
      const double purity = (s.rho * s.rho).trace().real();
      CHECK(purity >= 0.25 - 1e-12);
      CHECK(purity <= 1.0 + 1e-12);
      CHECK(s.rho.diagonal().real().minCoeff() >= 0.0);
      CHECK(std::abs(s.rho.trace() - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("sampling is deterministic under the seed") {
    const auto a = sample_states({FamilyKind::product_pure, 9}, 50);
    const auto b = sample_states({FamilyKind::product_pure, 9}, 50);
    const auto c = sample_states({FamilyKind::product_pure, 10}, 50);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].rho == b[i].rho);
    CHECK(a[0].rho != c[0].rho);
    // sample i does not depend on n
    CHECK(sample_states({FamilyKind::product_pure, 9}, 7)[6].rho == a[6].rho);
    CHECK_THROWS_AS(sample_states({FamilyKind::singlet, 0}, 0), ConfigError);
    CHECK(family_from_name("incoherent") == FamilyKind::incoherent_diagonal);
    CHECK_THROWS_AS(family_from_name("GHZ"), ConfigError);
  }

  TEST_CASE("no hyperfine couplings: every optimum is zero") {
    RadicalPairSetup s;
    s.radical1 = testing::radical({});
    s.radical2 = testing::radical({});
    for (auto k : {FamilyKind::product_pure, FamilyKind::incoherent_diagonal, FamilyKind::singlet})
      CHECK(std::abs(optimal_sensitivity({k, 1}, 20, s, 2.0).lambda) <= 1e-10);
  }

  TEST_CASE("separable optimum is the classical mixture, below the singlet") {
    auto s = ci_pair();
    const auto d = response_derivative(s, 4.0);
    const auto prod = optimal_sensitivity({FamilyKind::product_pure, 1}, 250, d);
    const auto inc = optimal_sensitivity({FamilyKind::incoherent_diagonal, 2}, 250, d);
    const double rc = std::abs(d.sensitivity(classical_mixture_state()));
    double best = 0.0;
    for (std::size_t i = 1; i < prod.sample_lambdas.size(); ++i) best = std::max(best, prod.sample_lambdas[i]);
    for (std::size_t i = 1; i < inc.sample_lambdas.size(); ++i) best = std::max(best, inc.sample_lambdas[i]);
    MESSAGE("|Lambda(rho_c)| = " << rc << ", best sample = " << best);
    CHECK(rc >= best - 2 * std::max(prod.standard_error, inc.standard_error));
    CHECK(std::abs(d.sensitivity(singlet_state())) > std::abs(prod.lambda));
    // the two families reach the same optimum: both include rho_c in the pool
    CHECK(std::abs(std::abs(prod.lambda) - std::abs(inc.lambda)) <=
          2 * std::max(prod.standard_error, inc.standard_error));
  }

  TEST_CASE("property: mixing never beats the better extreme point") {
    auto s = ci_pair();
    const auto d = response_derivative(s, 3.0);
    const auto st = sample_states({FamilyKind::product_pure, 4}, 40);
    for (std::size_t i = 0; i + 1 < st.size(); i += 2) {
      for (double p : {0.25, 0.5, 0.8}) {
        TwoElectronState m;
        m.rho = p * st[i].rho + (1 - p) * st[i + 1].rho;
        const double lm = d.sensitivity(m);
        CHECK(std::abs(lm - (p * d.sensitivity(st[i]) + (1 - p) * d.sensitivity(st[i + 1]))) <= 1e-8);
        CHECK(std::abs(lm) <= std::max(std::abs(d.sensitivity(st[i])), std::abs(d.sensitivity(st[i + 1]))) + 1e-8);
      }
    }
  }

  TEST_CASE("pi/2-X probe: singlet unchanged, classical mixture collapses") {
    auto s = ci_pair();
    const auto singlet = pulse_probe(singlet_state(), s, 4.0);
    CHECK(std::abs(singlet.lambda_after - singlet.lambda_before) <= 1e-6);
    const auto rc = pulse_probe(classical_mixture_state(), s, 4.0);
    MESSAGE("rho_c: before " << rc.lambda_before << ", after " << rc.lambda_after);
    CHECK(std::abs(rc.lambda_after / rc.lambda_before) < 0.5);
    const auto t0 = pulse_probe(triplet_zero_state(), s, 4.0);
    MESSAGE("T0: before " << t0.lambda_before << ", after " << t0.lambda_after);
    CHECK(std::abs(t0.lambda_after - t0.lambda_before) > 1e-6);
  }

  TEST_CASE("visibility census") {
    const std::vector<double> th{0.0, 0.6, 1.2, 1.8, 2.4, M_PI};
    auto iso = ci_pair();
    iso.radical1 = truncate_bath(preset_py(), 2);
    iso.radical2 = truncate_bath(preset_dma(), 2);
    const auto flat = visibility_census({{FamilyKind::singlet, 1}}, 1, iso, 2.0, th);
    CHECK(flat.singlet_visibility <= 1e-8);
    CHECK(flat.entries[0].visibility <= 1e-8);
    // isotropic couplings: tilting the field equals counter-rotating the initial state
    const auto st = sample_states({FamilyKind::product_pure, 1}, 5);
    RadicalPairSetup z = iso;
    z.theta = 0.0;
    const auto wz = yield_response(z, 2.0);
    for (double t : {0.6, 1.8}) {
      RadicalPairSetup n = iso;
      n.theta = t;
      const auto wn = yield_response(n, 2.0);
      const Mat2c r = oracle::rot(Vec3::UnitY(), t);
      const Mat4c u = oracle::kron(CMat(r), CMat(r));
      for (const auto& rho : st) {
        TwoElectronState back;
        back.rho = u.adjoint() * rho.rho * u;
        CHECK(std::abs(wn.yield(rho) - wz.yield(back)) <= 1e-6);
      }
    }

    auto mol = preset_fadh_o2_standin();
    RadicalPairSetup fadh;
    fadh.radical1 = truncate_bath(mol.radical1, 3);
    fadh.radical2 = mol.radical2;
    fadh.reencounter = ReencounterModel{5e5};
    const auto one = visibility_census({{FamilyKind::singlet, 0}}, 1, fadh, 0.046, th);
    REQUIRE(one.entries.size() == 1);
    CHECK(one.entries[0].visibility == doctest::Approx(one.singlet_visibility).epsilon(1e-12));
    CHECK(one.fraction_at_least_singlet() == 1.0);
    CHECK(one.singlet_visibility > 0.0);
    const auto prod = visibility_census({{FamilyKind::product_pure, 3}}, 20, fadh, 0.046, th);
    MESSAGE("V_s = " << prod.singlet_visibility << ", fraction >= V_s: " << prod.fraction_at_least_singlet());
    CHECK(prod.fraction_at_least_singlet() > 0.0);
    std::ostringstream os;
    write_census_csv(os, prod);
    CHECK(os.str().find("sample_index,family,seed,visibility,concurrence,purity") != std::string::npos);
  }
}
