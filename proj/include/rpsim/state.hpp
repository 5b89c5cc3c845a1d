#pragma once

#include "rpsim/types.hpp"

namespace rpsim {

/// Density matrix of the electron pair in the basis |uu>, |ud>, |du>, |dd>
/// (first factor radical 1, u = spin up along z).
struct TwoElectronState {
  Mat4c rho = Mat4c::Zero();

  /// Throws InvariantError unless Hermitian (1e-12), unit trace (1e-12)
  /// and positive semidefinite (-1e-10).
  void validate() const;

  /// Pauli coordinates r_ij = Tr[rho sigma_i (x) sigma_j], i, j over (1, x, y, z).
  Mat4 pauli() const;
  static TwoElectronState from_pauli(const Mat4& r);
};

TwoElectronState singlet_state();
TwoElectronState triplet_zero_state();
TwoElectronState triplet_plus_state();
TwoElectronState triplet_minus_state();
/// (|ud><ud| + |du><du|) / 2.
TwoElectronState classical_mixture_state();
/// |a>|b> for single-spin amplitudes (normalized internally).
TwoElectronState product_state(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b);

/// |S><S| with |S> = (|ud> - |du>)/sqrt(2).
const Mat4c& singlet_projector();

/// sigma_i (x) sigma_j.
Mat4c pauli_product(int i, int j);

}  // namespace rpsim
