#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rpsim/channel.hpp"
#include "rpsim/control.hpp"
#include "rpsim/field.hpp"
#include "rpsim/radical.hpp"
#include "rpsim/types.hpp"

namespace rpsim {

/// Times j * dt for j = 0..steps.
struct UniformGrid {
  double dt = 0.0;
  std::size_t steps = 0;

  double t_end() const { return dt * static_cast<double>(steps); }
  double time(std::size_t j) const { return dt * static_cast<double>(j); }
  std::vector<double> times() const;
};

/// Largest block Hilbert dimension that is propagated as a dense matrix.
inline constexpr std::size_t kDenseLimit = 1024;

/// Transfer matrices of one radical at every grid time. Exact baths propagate
/// each block's full unitary (dense step propagators built by Chebyshev and
/// cached per field sign and step length, or column-wise Chebyshev above
/// `dense_limit`); sampled baths propagate basis-state column pairs. The
/// transfer at a pulse time is taken after the pulse.
std::vector<Mat4> grid_channel_series(const RadicalSpec& radical, int radical_index,
                                      const FieldSchedule& schedule,
                                      const std::optional<PulseSequence>& pulses,
                                      const UniformGrid& grid, const BathStrategy& bath,
                                      double tol = kDefaultTolerance,
                                      std::size_t dense_limit = kDenseLimit);

/// Transfer matrices at the given ascending times from eigen-decompositions of
/// the block Hamiltonians. Exact baths only.
std::vector<Mat4> spectral_channel_series(const RadicalSpec& radical, int radical_index,
                                          const FieldSchedule& schedule,
                                          const std::optional<PulseSequence>& pulses,
                                          const std::vector<double>& times,
                                          const BathStrategy& bath);

/// Diagonal of the singlet projector in the Pauli product basis:
/// P_s = sum_k s_k sigma_k (x) sigma_k, s = (1, -1, -1, -1) / 4.
inline constexpr double kSingletWeights[4] = {0.25, -0.25, -0.25, -0.25};

/// Integrand kernel of the yield functional: G_ij = sum_k s_k M1_ki M2_kj, so that
/// f_s = sum_ij r_ij G_ij for initial Pauli coordinates r.
Mat4 singlet_kernel(const Mat4& m1, const Mat4& m2);

/// W = int_0^t_end k e^{-kt} G(t) dt + e^{-k t_end} G(t_end), integrated in
/// closed form segment by segment over the eigen-decomposed block dynamics.
/// k in ns^-1. Exact baths only.
Mat4 spectral_response(const RadicalSpec& radical1, const RadicalSpec& radical2,
                       const FieldSchedule& schedule, const std::optional<PulseSequence>& pulses,
                       double k_ns, double t_end, const BathStrategy& bath);

}  // namespace rpsim
