#pragma once

#include <functional>
#include <optional>

#include "rpsim/chebyshev.hpp"
#include "rpsim/control.hpp"
#include "rpsim/field.hpp"
#include "rpsim/hamiltonian.hpp"

namespace rpsim {

using HamiltonianBuilder = std::function<HamiltonianHandle(const Vec3& field_mT)>;

/// Hamiltonians for the two field signs of an alternating schedule.
struct SignedHamiltonians {
  HamiltonianHandle plus;
  std::optional<HamiltonianHandle> minus;

  SignedHamiltonians(const HamiltonianBuilder& builder, const FieldSchedule& schedule);
  const HamiltonianHandle& at(int sign) const { return sign > 0 ? plus : *minus; }
};

/// Walks a timeline: Chebyshev segments under the active field, and the pulse
/// unitary on the electron factor wherever a segment ends in a pulse (when
/// `pulse` is non-null). Columns of `psi` evolve independently.
CMat evolve_timeline(const SignedHamiltonians& h, const Timeline& timeline, const Mat2c* pulse,
                     const CMat& psi, double tol = kDefaultTolerance);

/// Piecewise evolution of one radical from 0 to t under a field schedule and
/// an optional pulse train. `radical_index` (1 or 2) selects whether a
/// single-electron pulse target acts on this radical.
CMat evolve_piecewise(const HamiltonianBuilder& builder, const FieldSchedule& schedule,
                      const std::optional<PulseSequence>& pulses, const CMat& psi, double t,
                      double tol = kDefaultTolerance, int radical_index = 1);

}  // namespace rpsim
