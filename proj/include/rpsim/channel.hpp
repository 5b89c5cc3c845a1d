#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rpsim/chebyshev.hpp"
#include "rpsim/control.hpp"
#include "rpsim/field.hpp"
#include "rpsim/radical.hpp"
#include "rpsim/state.hpp"
#include "rpsim/types.hpp"

namespace rpsim {

/// a_t = Xi(|u><u|)_uu and kappa_t, the coefficient in |u><d| -> kappa_t |u><d|,
/// both normalized by the bath dimension. A bare electron in a field B along z
/// has kappa_t = exp(i gamma_e B t).
struct IsoParams {
  double a = 1.0;
  cplx kappa{1.0, 0.0};
};

/// Single-electron map on Pauli coordinates: Xi(sigma_j) = sum_i M_ij sigma_i,
/// M_ij = Tr[sigma_i Xi(sigma_j)] / 2, basis (1, x, y, z).
struct ElectronChannel {
  Mat4 transfer = Mat4::Identity();
  double time = 0.0;
  std::optional<IsoParams> iso;
  std::optional<Mat4> standard_error;  // sampled baths only
  /// The forbidden-entry lemma applies: isotropic couplings, field along z, no pulses.
  bool zero_block_applicable = false;

  /// S(c*2+c', a*2+b) = Xi(|a><b|)_{cc'}.
  Mat4c superoperator() const;
  static ElectronChannel from_superoperator(const Mat4c& s, double time);
  Mat2c apply(const Mat2c& rho) const;
};

/// Mat4 Choi matrix sum_ab |a><b| (x) Xi(|a><b|).
Mat4c choi_matrix(const ElectronChannel& ch);
/// Throws InvariantError unless trace preserving (1e-10) and completely positive (-1e-9).
void check_channel(const ElectronChannel& ch);

struct BathStrategy {
  enum class Kind { automatic, exact, sampled };
  Kind kind = Kind::automatic;
  std::size_t n_samples = 256;
  std::uint64_t seed = 0;
  /// Couple nuclei with identical tensors into total-spin multiplets.
  bool group_equivalent = true;
  /// Largest nuclear dimension summed exactly (per block when grouping).
  std::size_t exact_cap = 1024;

  static BathStrategy exact(bool grouping = true);
  static BathStrategy sampled(std::size_t n, std::uint64_t seed);
};

/// Decomposition of a radical's bath under the strategy; for sampled baths a
/// single ungrouped block. Throws ConfigError when exact summation exceeds the cap.
std::vector<BathBlock> bath_blocks(const RadicalSpec& radical, const BathStrategy& bath);
bool uses_sampling(const RadicalSpec& radical, const BathStrategy& bath);

/// Superoperator of one exact block from its full propagator U (dim 2m, electron
/// index most significant): S(cc', ab) = (1/m) sum Frobenius(U_ca, U_c'b).
Mat4c block_superoperator(const CMat& u);

/// Xi_t of one radical with the bath in the maximally mixed state.
ElectronChannel tomograph_channel(const RadicalSpec& radical, const FieldSchedule& schedule,
                                  const std::optional<PulseSequence>& pulses, double t,
                                  const BathStrategy& bath = {}, int radical_index = 1,
                                  double tol = kDefaultTolerance);

struct ZeroBlockReport {
  bool applicable = false;
  double max_forbidden = 0.0;  // includes |Xi(uu)_uu - Xi(dd)_dd|
  double tolerance = 0.0;
  bool pass = false;
};

ZeroBlockReport verify_zero_blocks(const ElectronChannel& ch);

/// r' = M1 r M2^T on Pauli coordinates.
Mat4 compose_pauli(const Mat4& m1, const Mat4& m2, const Mat4& r);
/// (Xi_1 (x) Xi_2)[rho]. Channels must refer to the same time.
TwoElectronState compose_on_pair(const ElectronChannel& ch1, const ElectronChannel& ch2,
                                 const TwoElectronState& initial);

}  // namespace rpsim
