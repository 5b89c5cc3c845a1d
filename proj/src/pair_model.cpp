#include "rpsim/pair_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rpsim/errors.hpp"
#include "rpsim/hamiltonian.hpp"

namespace rpsim {

Vec3 RadicalPairSetup::direction() const { return direction_from_angles(theta, phi); }

FieldSchedule RadicalPairSetup::schedule(double field_mT) const {
  FieldSchedule base;
  base.magnitude_mT = field_mT;
  base.direction = direction();
  return protocol.schedule_for(base);
}

std::optional<PulseSequence> RadicalPairSetup::pulses() const {
  return protocol.pulses_for(direction());
}

void RadicalPairSetup::validate() const {
  rpsim::validate(radical1);
  rpsim::validate(radical2);
  reencounter.validate();
  initial.validate();
  if (const auto p = pulses()) p->validate();
}

namespace {

// Largest L with every period an integer multiple of it, or 0.
double common_unit(const std::vector<double>& periods) {
  if (periods.empty()) return 0.0;
  const double p0 = *std::max_element(periods.begin(), periods.end());
  for (int q = 1; q <= 1000; ++q) {
    const double l = p0 / q;
    bool ok = true;
    for (double p : periods) {
      const double r = p / l;
      if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r)) {
        ok = false;
        break;
      }
    }
    if (ok) return l;
  }
  return 0.0;
}

double spectral_bound(const RadicalSpec& r, double field_mT) {
  return HamiltonianHandle(r, Vec3(0, 0, std::abs(field_mT))).spectral_radius_bound();
}

}  // namespace

UniformGrid default_grid(const RadicalPairSetup& setup, double field_mT) {
  setup.reencounter.validate();
  const FieldSchedule sched = setup.schedule(field_mT);
  const double wmax = std::max(spectral_bound(setup.radical1, sched.magnitude_mT),
                               spectral_bound(setup.radical2, sched.magnitude_mT));
  const double tmax = setup.reencounter.t_max();
  double dt = tmax / 2000.0;
  if (wmax > 0.0) dt = std::min(dt, 0.05 / wmax);
  std::vector<double> periods;
  if (const auto p = setup.pulses(); p && !p->single_shot) {
    periods.push_back(p->period);
    if (p->start_offset > 0.0) periods.push_back(p->start_offset);
  }
  if (sched.alternation_period) periods.push_back(*sched.alternation_period);
  if (const double l = common_unit(periods); l > 0.0)
    dt = l / (4.0 * std::ceil(l / (4.0 * dt)));
  auto steps = static_cast<std::size_t>(std::ceil(tmax / dt - 1e-9));
  steps = (steps + 3) / 4 * 4;
  return UniformGrid{dt, steps};
}

bool prefers_spectral(const RadicalPairSetup& setup, const UniformGrid& grid) {
  switch (setup.options.engine) {
    case EngineKind::grid: return false;
    case EngineKind::spectral: return true;
    case EngineKind::automatic: return grid.steps > setup.options.max_grid_steps;
  }
  return false;
}

ChannelPairSeries channel_pair_series(const RadicalPairSetup& setup, double field_mT,
                                      const UniformGrid& grid) {
  const FieldSchedule sched = setup.schedule(field_mT);
  const auto pulses = setup.pulses();
  const auto& o = setup.options;
  ChannelPairSeries out;
  out.grid = grid;
  if (setup.options.engine == EngineKind::spectral) {
    const auto t = grid.times();
    out.m1 = spectral_channel_series(setup.radical1, 1, sched, pulses, t, o.bath);
    out.m2 = spectral_channel_series(setup.radical2, 2, sched, pulses, t, o.bath);
  } else {
    out.m1 = grid_channel_series(setup.radical1, 1, sched, pulses, grid, o.bath, o.tol,
                                 o.dense_limit);
    out.m2 = grid_channel_series(setup.radical2, 2, sched, pulses, grid, o.bath, o.tol,
                                 o.dense_limit);
  }
  return out;
}

double YieldResponse::yield(const TwoElectronState& rho) const {
  return (rho.pauli().array() * w.array()).sum();
}

YieldResponse yield_response(const RadicalPairSetup& setup, double field_mT,
                             const std::optional<UniformGrid>& grid) {
  if (!(field_mT >= 0.0) || !std::isfinite(field_mT))
    throw ConfigError("field magnitude must be finite and non-negative");
  const UniformGrid g = grid ? *grid : default_grid(setup, field_mT);
  YieldResponse out;
  if (prefers_spectral(setup, g)) {
    out.w = spectral_response(setup.radical1, setup.radical2, setup.schedule(field_mT),
                              setup.pulses(), setup.reencounter.rate_per_ns(),
                              setup.reencounter.t_max(), setup.options.bath);
    out.spectral = true;
    return out;
  }
  const auto series = channel_pair_series(setup, field_mT, g);
  std::vector<std::vector<double>> entries(16, std::vector<double>(g.steps + 1));
  for (std::size_t j = 0; j <= g.steps; ++j) {
    const Mat4 k = singlet_kernel(series.m1[j], series.m2[j]);
    for (int x = 0; x < 16; ++x) entries[x][j] = k(x / 4, x % 4);
  }
  for (int x = 0; x < 16; ++x) {
    const auto q = reencounter_integral(entries[x], g.dt, setup.reencounter);
    out.w(x / 4, x % 4) = q.value;
    out.error_estimate = std::max(out.error_estimate, q.error_estimate);
  }
  return out;
}

QuadratureResult pair_singlet_yield(const RadicalPairSetup& setup, double field_mT) {
  const auto r = yield_response(setup, field_mT);
  return {r.yield(setup.initial), r.error_estimate};
}

TwoElectronState pair_state_at(const RadicalPairSetup& setup, double field_mT,
                               const TwoElectronState& initial, double t) {
  const FieldSchedule sched = setup.schedule(field_mT);
  const auto pulses = setup.pulses();
  const auto c1 = tomograph_channel(setup.radical1, sched, pulses, t, setup.options.bath, 1,
                                    setup.options.tol);
  const auto c2 = tomograph_channel(setup.radical2, sched, pulses, t, setup.options.bath, 2,
                                    setup.options.tol);
  return compose_on_pair(c1, c2, initial);
}

Trajectory pair_trajectory(const RadicalPairSetup& setup, double field_mT,
                           const TwoElectronState& initial,
                           const std::optional<UniformGrid>& grid) {
  const UniformGrid g = grid ? *grid : default_grid(setup, field_mT);
  const auto series = channel_pair_series(setup, field_mT, g);
  const Mat4 r = initial.pauli();
  std::vector<TwoElectronState> states(g.steps + 1);
  for (std::size_t j = 0; j <= g.steps; ++j)
    states[j] = TwoElectronState::from_pauli(compose_pauli(series.m1[j], series.m2[j], r));
  Trajectory traj = Trajectory::from_states(g.times(), std::move(states));
  traj.evaluator = [setup, field_mT, initial](double t) {
    return pair_state_at(setup, field_mT, initial, t);
  };
  return traj;
}

}  // namespace rpsim
