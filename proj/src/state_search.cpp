#include "rpsim/state_search.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "rpsim/errors.hpp"
#include "rpsim/observables.hpp"
#include "rpsim/rng.hpp"
#include "rpsim/units.hpp"

namespace rpsim {

FamilyKind family_from_name(const std::string& name) {
  if (name == "product" || name == "product-pure") return FamilyKind::product_pure;
  if (name == "incoherent" || name == "incoherent-diagonal") return FamilyKind::incoherent_diagonal;
  if (name == "singlet") return FamilyKind::singlet;
  if (name == "T0") return FamilyKind::triplet_zero;
  if (name == "rho_c") return FamilyKind::rho_c;
  throw ConfigError("unknown state family '" + name +
                    "' (expected product, incoherent, singlet, T0 or rho_c)");
}

std::string family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::product_pure: return "product";
    case FamilyKind::incoherent_diagonal: return "incoherent";
    case FamilyKind::singlet: return "singlet";
    case FamilyKind::triplet_zero: return "T0";
    case FamilyKind::rho_c: return "rho_c";
  }
  return "";
}

namespace {

Eigen::Vector2cd random_spinor(std::mt19937_64& g) {
  Eigen::Vector2cd v;
  for (int i = 0; i < 2; ++i) {
    const double re = standard_normal(g);
    const double im = standard_normal(g);
    v(i) = cplx{re, im};
  }
  return v.normalized();
}

}  // namespace

std::vector<TwoElectronState> sample_states(const StateFamily& family, std::size_t n) {
  if (n == 0) throw ConfigError("need at least one sample");
  std::vector<TwoElectronState> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto g = make_stream(family.seed, i);
    switch (family.kind) {
      case FamilyKind::product_pure: {
        const auto a = random_spinor(g);
        const auto b = random_spinor(g);
        out[i] = product_state(a, b);
        break;
      }
      case FamilyKind::incoherent_diagonal: {
        double w[4], sum = 0.0;
        for (double& x : w) {
          double u = uniform01(g);
          while (u <= 0.0) u = uniform01(g);
          x = -std::log(u);
          sum += x;
        }
        for (int k = 0; k < 4; ++k) out[i].rho(k, k) = w[k] / sum;
        break;
      }
      case FamilyKind::singlet: out[i] = singlet_state(); break;
      case FamilyKind::triplet_zero: out[i] = triplet_zero_state(); break;
      case FamilyKind::rho_c: out[i] = classical_mixture_state(); break;
    }
  }
  return out;
}

OptimalSensitivity optimal_sensitivity(const StateFamily& family, std::size_t n,
                                       const ResponseDerivative& derivative) {
  std::vector<TwoElectronState> pool{classical_mixture_state()};
  const auto samples = sample_states(family, n);
  pool.insert(pool.end(), samples.begin(), samples.end());
  OptimalSensitivity out;
  out.sample_lambdas.resize(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i)
    out.sample_lambdas[i] = std::abs(derivative.sensitivity(pool[i]));
  const auto best = std::max_element(out.sample_lambdas.begin(), out.sample_lambdas.end());
  out.index = static_cast<std::size_t>(best - out.sample_lambdas.begin());
  out.state = pool[out.index];
  out.lambda = derivative.sensitivity(out.state);
  out.winner_is_rho_c = out.index == 0;
  double mean = 0.0;
  for (std::size_t i = 1; i < pool.size(); ++i) mean += out.sample_lambdas[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 1; i < pool.size(); ++i)
    var += (out.sample_lambdas[i] - mean) * (out.sample_lambdas[i] - mean);
  out.standard_error = n > 1 ? std::sqrt(var / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return out;
}

OptimalSensitivity optimal_sensitivity(const StateFamily& family, std::size_t n,
                                       const RadicalPairSetup& setup, double field_mT) {
  return optimal_sensitivity(family, n, response_derivative(setup, field_mT));
}

ProbeResult pulse_probe(const TwoElectronState& initial, const RadicalPairSetup& setup,
                        double field_mT, double h) {
  RadicalPairSetup before = setup;
  before.initial = initial;
  RadicalPairSetup after = before;
  after.protocol = protocol_by_name("CS-P", 1.0, 1.0);
  return {field_sensitivity(before, field_mT, h).value, field_sensitivity(after, field_mT, h).value};
}

double CensusResult::fraction_at_least_singlet() const {
  if (entries.empty()) return 0.0;
  std::size_t c = 0;
  for (const auto& e : entries)
    if (e.visibility >= singlet_visibility) ++c;
  return static_cast<double>(c) / static_cast<double>(entries.size());
}

CensusResult visibility_census(const std::vector<StateFamily>& families, std::size_t n,
                               const RadicalPairSetup& setup, double field_mT,
                               const std::vector<double>& thetas) {
  std::vector<YieldResponse> responses(thetas.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    RadicalPairSetup s = setup;
    s.theta = thetas[i];
    s.phi = 0.0;
    responses[i] = yield_response(s, field_mT);
  }
  auto curve_visibility = [&](const TwoElectronState& rho) {
    std::vector<double> y(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) y[i] = responses[i].yield(rho);
    return visibility(y);
  };
  CensusResult out;
  out.singlet_visibility = curve_visibility(singlet_state());
  for (const auto& fam : families) {
    const auto states = sample_states(fam, n);
    for (std::size_t i = 0; i < states.size(); ++i) {
      CensusEntry e;
      e.index = i;
      e.family = family_name(fam.kind);
      e.seed = fam.seed;
      e.visibility = curve_visibility(states[i]);
      e.concurrence = concurrence(states[i]);
      e.purity = (states[i].rho * states[i].rho).trace().real();
      out.entries.push_back(e);
    }
  }
  return out;
}

void write_census_csv(std::ostream& os, const CensusResult& census) {
  os << "# singlet_visibility: " << std::setprecision(12) << census.singlet_visibility << "\n";
  os << "sample_index,family,seed,visibility,concurrence,purity\n";
  for (const auto& e : census.entries)
    os << e.index << "," << e.family << "," << e.seed << "," << e.visibility << ","
       << e.concurrence << "," << e.purity << "\n";
}

}  // namespace rpsim
