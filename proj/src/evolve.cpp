#include "rpsim/evolve.hpp"

#include "rpsim/errors.hpp"
#include "rpsim/kernels.hpp"

namespace rpsim {

SignedHamiltonians::SignedHamiltonians(const HamiltonianBuilder& builder,
                                       const FieldSchedule& schedule)
    : plus(builder(schedule.vector())) {
  if (schedule.alternation_period) minus.emplace(builder(-schedule.vector()));
}

CMat evolve_timeline(const SignedHamiltonians& h, const Timeline& timeline, const Mat2c* pulse,
                     const CMat& psi, double tol) {
  CMat state = psi;
  const std::size_t dim = h.plus.dim();
  if (pulse && timeline.pulse_at_start)
    kernels::electron_rotate_parallel(*pulse, state.data(), dim, state.cols());
  for (const auto& seg : timeline.segments) {
    const double dt = seg.t1 - seg.t0;
    if (dt > 0.0) state = chebyshev_propagate(h.at(seg.sign), state, dt, tol);
    if (pulse && seg.pulse_after)
      kernels::electron_rotate_parallel(*pulse, state.data(), dim, state.cols());
  }
  return state;
}

CMat evolve_piecewise(const HamiltonianBuilder& builder, const FieldSchedule& schedule,
                      const std::optional<PulseSequence>& pulses, const CMat& psi, double t,
                      double tol, int radical_index) {
  if (t < 0.0) throw ConfigError("piecewise evolution requires t >= 0");
  schedule.validate();
  if (pulses) pulses->validate();
  const SignedHamiltonians h(builder, schedule);
  const Timeline tl = build_timeline(schedule, pulses, t);
  std::optional<Mat2c> u;
  if (pulses && pulses->acts_on(radical_index)) u = pulses->unitary();
  return evolve_timeline(h, tl, u ? &*u : nullptr, psi, tol);
}

}  // namespace rpsim
