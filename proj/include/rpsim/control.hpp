#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rpsim/field.hpp"
#include "rpsim/hamiltonian.hpp"
#include "rpsim/radical.hpp"
#include "rpsim/types.hpp"
#include "rpsim/units.hpp"

namespace rpsim {

enum class PulseTarget { both, electron1, electron2 };

/// Ideal instantaneous rotations exp(-i angle n.sigma/2) on electron spins.
/// Pulses fire at start_offset + m * period for every such time > 0
/// (m = 0, 1, ...); a single-shot sequence fires once at t = 0+.
struct PulseSequence {
  double period = 0.0;  // tau_c, ns
  Vec3 axis = Vec3::UnitZ();
  double angle = units::kPi;
  double start_offset = 0.0;
  PulseTarget target = PulseTarget::both;
  bool single_shot = false;

  /// Pulse times in (0, t_end], or {0} for single-shot.
  std::vector<double> times_until(double t_end) const;
  bool acts_on(int radical_index) const;  // radical_index is 1 or 2
  Mat2c unitary() const;
  void validate() const;
};

/// How a protocol's pulse axis is tied to the field direction.
enum class AxisFrame { along_field, perpendicular_field, lab };

/// A named control protocol: an optional pulse train, optional field
/// alternation, optionally forcing the static field to zero.
struct Protocol {
  std::string name = "N";
  std::optional<PulseSequence> pulses;
  AxisFrame axis_frame = AxisFrame::along_field;
  std::optional<double> alternation_period;
  bool zero_field = false;

  /// Pulse train with the axis resolved for a field along `direction`.
  std::optional<PulseSequence> pulses_for(const Vec3& direction) const;
  /// The field schedule this protocol produces from a static field.
  FieldSchedule schedule_for(const FieldSchedule& base) const;
};

/// Direction perpendicular to `direction` in its polar plane: e_theta of the
/// spherical frame, or +x when the field is along z.
Vec3 perpendicular_axis(const Vec3& direction);

/// pi-pulses about z every tau_c on both electrons.
PulseSequence protocol_Z(double tau_c);
/// pi-pulses about x every tau_c on both electrons.
PulseSequence protocol_X(double tau_c);

/// Field alternation every tau_a; with_X adds pi-X pulses at the flip times.
struct AlternationProtocol {
  double alternation_period;
  std::optional<PulseSequence> pulses;
};
AlternationProtocol protocol_RB(double tau_a, bool with_X);

/// Names accepted by protocol_by_name.
const std::vector<std::string>& protocol_names();

/// N, Z, X, RB, RB-X, CS-P, QC-only. CS-P is a single pi/2-X pulse at t = 0+;
/// QC-only is Z-type pulses along the field direction with the field magnitude
/// forced to zero. `fixed_lab_perpendicular` pins perpendicular pulse axes to +x.
Protocol protocol_by_name(const std::string& name, double tau_c, double tau_a,
                          bool fixed_lab_perpendicular = false);

/// First-order average Hamiltonian under pi-Z control:
/// -gamma_e B S_z + sum_j lambda_j S_z I_z^(j). Requires isotropic couplings and a field along z.
HamiltonianHandle average_hamiltonian_Z(const RadicalSpec& radical, const Vec3& field_mT);

/// One constant-field stretch of a piecewise evolution.
struct Segment {
  double t0 = 0.0;
  double t1 = 0.0;
  int sign = 1;
  bool pulse_after = false;
  bool record_after = false;  // t1 is one of the requested sample times
};

struct Timeline {
  bool pulse_at_start = false;
  std::vector<Segment> segments;
};

/// Ordered union of pulse times, field flips and requested sample times in
/// (0, t_end]. Coincident events are merged (tolerance 1e-9 ns); at a
/// coincident flip and pulse the field flips first, then the pulse fires.
Timeline build_timeline(const FieldSchedule& schedule, const std::optional<PulseSequence>& pulses,
                        double t_end, const std::vector<double>& sample_times = {});

}  // namespace rpsim
