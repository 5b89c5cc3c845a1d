#pragma once

#include <optional>
#include <vector>

#include "rpsim/channel.hpp"
#include "rpsim/control.hpp"
#include "rpsim/engines.hpp"
#include "rpsim/observables.hpp"
#include "rpsim/radical.hpp"
#include "rpsim/state.hpp"

namespace rpsim {

enum class EngineKind { automatic, grid, spectral };

struct SimulationOptions {
  double tol = kDefaultTolerance;
  BathStrategy bath;
  EngineKind engine = EngineKind::automatic;
  /// Above this many grid steps the automatic engine switches to the spectral route.
  std::size_t max_grid_steps = 200000;
  std::size_t dense_limit = kDenseLimit;
};

/// Everything that defines a radical-pair experiment except the field magnitude.
struct RadicalPairSetup {
  RadicalSpec radical1;
  RadicalSpec radical2;
  double theta = 0.0;  // field polar angle, rad
  double phi = 0.0;
  Protocol protocol;
  ReencounterModel reencounter;
  TwoElectronState initial = singlet_state();
  SimulationOptions options;

  Vec3 direction() const;
  /// Field schedule at magnitude B (mT) after the protocol's modifications.
  FieldSchedule schedule(double field_mT) const;
  /// Pulse train with the axis resolved against the field direction.
  std::optional<PulseSequence> pulses() const;
  void validate() const;
};

/// Uniform grid for a field magnitude: dt = min(0.05 / w_max, t_max / 2000),
/// shrunk so pulse and alternation times fall on every fourth grid point when
/// they are commensurate, and the step count rounded up to a multiple of 4.
UniformGrid default_grid(const RadicalPairSetup& setup, double field_mT);

/// True when the automatic engine picks the closed-form spectral route.
bool prefers_spectral(const RadicalPairSetup& setup, const UniformGrid& grid);

/// Transfer-matrix series of both radicals on a grid.
struct ChannelPairSeries {
  UniformGrid grid;
  std::vector<Mat4> m1;
  std::vector<Mat4> m2;
};

ChannelPairSeries channel_pair_series(const RadicalPairSetup& setup, double field_mT,
                                      const UniformGrid& grid);

/// Linear yield functional Phi(rho) = sum_ij r_ij W_ij over Pauli coordinates
/// r_ij of the initial state.
struct YieldResponse {
  Mat4 w = Mat4::Zero();
  double error_estimate = 0.0;
  bool spectral = false;

  double yield(const TwoElectronState& rho) const;
};

YieldResponse yield_response(const RadicalPairSetup& setup, double field_mT,
                             const std::optional<UniformGrid>& grid = std::nullopt);

/// Singlet yield of the setup's initial state.
QuadratureResult pair_singlet_yield(const RadicalPairSetup& setup, double field_mT);

/// Two-electron trajectory with an evaluator for exact re-evaluation at any time.
Trajectory pair_trajectory(const RadicalPairSetup& setup, double field_mT,
                           const TwoElectronState& initial,
                           const std::optional<UniformGrid>& grid = std::nullopt);

/// Exact state at a single time from channel tomography of both radicals.
TwoElectronState pair_state_at(const RadicalPairSetup& setup, double field_mT,
                               const TwoElectronState& initial, double t);

}  // namespace rpsim
