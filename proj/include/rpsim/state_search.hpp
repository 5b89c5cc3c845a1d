#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "rpsim/pair_model.hpp"
#include "rpsim/sensitivity.hpp"
#include "rpsim/state.hpp"

namespace rpsim {

enum class FamilyKind { product_pure, incoherent_diagonal, singlet, triplet_zero, rho_c };

struct StateFamily {
  FamilyKind kind = FamilyKind::product_pure;
  std::uint64_t seed = 0;
};

FamilyKind family_from_name(const std::string& name);
std::string family_name(FamilyKind kind);

/// Product-pure: each spin from two complex Gaussian amplitudes, normalized.
/// Incoherent: diagonal weights uniform on the simplex (normalized unit
/// exponentials). Sample i uses random stream i of the seed. Named families
/// repeat their state n times.
std::vector<TwoElectronState> sample_states(const StateFamily& family, std::size_t n);

struct OptimalSensitivity {
  TwoElectronState state;
  double lambda = 0.0;        // signed Lambda of the winner
  std::size_t index = 0;      // position in the candidate pool; 0 is rho_c
  bool winner_is_rho_c = false;
  double standard_error = 0.0;  // of |Lambda| over the sampled pool
  std::vector<double> sample_lambdas;  // |Lambda| of every candidate, pool order
};

/// argmax |Lambda| over rho_c followed by n samples of the family, using one
/// field derivative of the yield functional for all candidates.
OptimalSensitivity optimal_sensitivity(const StateFamily& family, std::size_t n,
                                       const ResponseDerivative& derivative);
OptimalSensitivity optimal_sensitivity(const StateFamily& family, std::size_t n,
                                       const RadicalPairSetup& setup, double field_mT);

/// Lambda of an initial state without and with a single pi/2-X pulse on both
/// electrons at t = 0+.
struct ProbeResult {
  double lambda_before = 0.0;
  double lambda_after = 0.0;
};
ProbeResult pulse_probe(const TwoElectronState& initial, const RadicalPairSetup& setup,
                        double field_mT, double h = kDefaultFieldStep);

/// Per-sample visibilities of angular yield curves. The yield functional is
/// computed once per angle and shared by all samples.
struct CensusEntry {
  std::size_t index = 0;
  std::string family;
  std::uint64_t seed = 0;
  double visibility = 0.0;
  double concurrence = 0.0;
  double purity = 0.0;
};
struct CensusResult {
  double singlet_visibility = 0.0;
  std::vector<CensusEntry> entries;
  double fraction_at_least_singlet() const;
};
CensusResult visibility_census(const std::vector<StateFamily>& families, std::size_t n,
                               const RadicalPairSetup& setup, double field_mT,
                               const std::vector<double>& thetas);

void write_census_csv(std::ostream& os, const CensusResult& census);

}  // namespace rpsim
