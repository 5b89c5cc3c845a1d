#pragma once

#include <functional>

#include "rpsim/hamiltonian.hpp"
#include "rpsim/types.hpp"

namespace rpsim {

inline constexpr double kDefaultTolerance = 1e-10;

/// Linear operator on column blocks: out = H * in.
using Applicator = std::function<void(const CMat& in, CMat& out)>;

struct ChebyshevStats {
  int terms = 0;
};

/// exp(-i H t) applied to every column of `psi` by Chebyshev expansion.
/// Columns must be normalized to 1 +- 1e-10. The series stops once the
/// Bessel coefficients stay below tol/10 for three consecutive orders past
/// the argument R|t|. Negative t evolves backwards.
CMat chebyshev_propagate(const HamiltonianHandle& h, const CMat& psi, double t,
                         double tol = kDefaultTolerance, ChebyshevStats* stats = nullptr);

/// Same, for any Hermitian operator given as an applicator with a spectral bound.
/// No normalization requirement is imposed here.
CMat chebyshev_propagate(const Applicator& apply, double spectral_bound, const CMat& psi,
                         double t, double tol = kDefaultTolerance,
                         ChebyshevStats* stats = nullptr);

/// exp(-i H t) as a dense matrix, built by propagating the identity.
CMat chebyshev_unitary(const HamiltonianHandle& h, double t, double tol = kDefaultTolerance);

}  // namespace rpsim
