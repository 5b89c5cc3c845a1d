#include "rpsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rpsim/errors.hpp"
#include "rpsim/spin_operators.hpp"
#include "rpsim/units.hpp"

namespace rpsim {

Vec3 direction_from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

FieldSchedule FieldSchedule::from_angles(double magnitude_mT, double theta, double phi,
                                         std::optional<double> alternation_period) {
  FieldSchedule f;
  f.magnitude_mT = magnitude_mT;
  f.direction = direction_from_angles(theta, phi);
  f.alternation_period = alternation_period;
  f.validate();
  return f;
}

int FieldSchedule::sign_at(double t) const {
  if (!alternation_period) return 1;
  const auto m = static_cast<long long>(std::floor(t / *alternation_period));
  return (m % 2 == 0) ? 1 : -1;
}

void FieldSchedule::validate() const {
  if (!std::isfinite(magnitude_mT)) throw ConfigError("field magnitude must be finite");
  if (std::abs(direction.norm() - 1.0) > 1e-12)
    throw ConfigError("field direction must be a unit vector");
  if (alternation_period && !(*alternation_period > 0.0))
    throw ConfigError("alternation period must be positive");
}

std::vector<double> PulseSequence::times_until(double t_end) const {
  if (single_shot) return {0.0};
  std::vector<double> out;
  for (long m = 0;; ++m) {
    const double t = start_offset + static_cast<double>(m) * period;
    if (t > t_end + 1e-9) break;
    if (t > 0.0) out.push_back(t);
  }
  return out;
}

bool PulseSequence::acts_on(int radical_index) const {
  switch (target) {
    case PulseTarget::both: return true;
    case PulseTarget::electron1: return radical_index == 1;
    case PulseTarget::electron2: return radical_index == 2;
  }
  return false;
}

Mat2c PulseSequence::unitary() const { return rotation(axis, angle); }

void PulseSequence::validate() const {
  if (!single_shot && !(period > 0.0)) throw ConfigError("pulse period must be positive");
  if (!(angle > 0.0 && angle < 2.0 * units::kPi))
    throw ConfigError("pulse angle must lie in (0, 2 pi)");
  if (std::abs(axis.norm() - 1.0) > 1e-12) throw ConfigError("pulse axis must be a unit vector");
  if (start_offset < 0.0) throw ConfigError("pulse start offset must be non-negative");
}

Vec3 perpendicular_axis(const Vec3& direction) {
  const Vec3 n = direction.normalized();
  const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
  const double rho = std::hypot(n.x(), n.y());
  const double phi = rho > 1e-15 ? std::atan2(n.y(), n.x()) : 0.0;
  return {std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta)};
}

PulseSequence protocol_Z(double tau_c) {
  PulseSequence p;
  p.period = tau_c;
  p.axis = Vec3::UnitZ();
  p.angle = units::kPi;
  p.validate();
  return p;
}

PulseSequence protocol_X(double tau_c) {
  PulseSequence p = protocol_Z(tau_c);
  p.axis = Vec3::UnitX();
  return p;
}

AlternationProtocol protocol_RB(double tau_a, bool with_X) {
  if (!(tau_a > 0.0)) throw ConfigError("alternation period must be positive");
  AlternationProtocol out{tau_a, std::nullopt};
  if (with_X) out.pulses = protocol_X(tau_a);
  return out;
}

std::optional<PulseSequence> Protocol::pulses_for(const Vec3& direction) const {
  if (!pulses) return std::nullopt;
  PulseSequence p = *pulses;
  switch (axis_frame) {
    case AxisFrame::along_field: p.axis = direction.normalized(); break;
    case AxisFrame::perpendicular_field: p.axis = perpendicular_axis(direction); break;
    case AxisFrame::lab: break;
  }
  return p;
}

FieldSchedule Protocol::schedule_for(const FieldSchedule& base) const {
  FieldSchedule s = base;
  if (zero_field) s.magnitude_mT = 0.0;
  if (alternation_period) s.alternation_period = alternation_period;
  return s;
}

const std::vector<std::string>& protocol_names() {
  static const std::vector<std::string> names{"N", "Z", "X", "RB", "RB-X", "CS-P", "QC-only"};
  return names;
}

Protocol protocol_by_name(const std::string& name, double tau_c, double tau_a,
                          bool fixed_lab_perpendicular) {
  Protocol p;
  p.name = name;
  const AxisFrame perp = fixed_lab_perpendicular ? AxisFrame::lab : AxisFrame::perpendicular_field;
  if (name == "N") {
  } else if (name == "Z") {
    p.pulses = protocol_Z(tau_c);
    p.axis_frame = AxisFrame::along_field;
  } else if (name == "X") {
    p.pulses = protocol_X(tau_c);
    p.axis_frame = perp;
  } else if (name == "RB") {
    p.alternation_period = protocol_RB(tau_a, false).alternation_period;
  } else if (name == "RB-X") {
    auto rb = protocol_RB(tau_a, true);
    p.alternation_period = rb.alternation_period;
    p.pulses = rb.pulses;
    p.axis_frame = perp;
  } else if (name == "CS-P") {
    PulseSequence s;
    s.single_shot = true;
    s.axis = Vec3::UnitX();
    s.angle = 0.5 * units::kPi;
    p.pulses = s;
    p.axis_frame = perp;
  } else if (name == "QC-only") {
    p.pulses = protocol_Z(tau_c);
    p.axis_frame = AxisFrame::along_field;
    p.zero_field = true;
  } else {
    std::ostringstream os;
    os << "unknown protocol '" << name << "' (expected one of N, Z, X, RB, RB-X, CS-P, QC-only)";
    throw ConfigError(os.str());
  }
  return p;
}

HamiltonianHandle average_hamiltonian_Z(const RadicalSpec& radical, const Vec3& field_mT) {
  if (!radical.isotropic())
    throw ConfigError("average_hamiltonian_Z requires isotropic hyperfine couplings");
  if (std::abs(field_mT.x()) > 1e-12 || std::abs(field_mT.y()) > 1e-12)
    throw ConfigError("average_hamiltonian_Z requires the field along z");
  RadicalSpec zz = radical;
  for (auto& n : zz.nuclei) {
    const double lam = n.hyperfine(0, 0);
    n.hyperfine = Mat3::Zero();
    n.hyperfine(2, 2) = lam;
  }
  return build_hamiltonian(zz, field_mT);
}

Timeline build_timeline(const FieldSchedule& schedule, const std::optional<PulseSequence>& pulses,
                        double t_end, const std::vector<double>& sample_times) {
  if (t_end < 0.0) throw ConfigError("evolution time must be non-negative");
  constexpr double kMerge = 1e-9;
  struct Mark {
    double t;
    int kind;  // 0 flip, 1 pulse, 2 sample, 3 end
  };
  std::vector<Mark> marks;
  Timeline tl;
  if (pulses) {
    if (pulses->single_shot) {
      tl.pulse_at_start = true;
    } else {
      for (double t : pulses->times_until(t_end)) marks.push_back({t, 1});
    }
  }
  if (schedule.alternation_period) {
    const double ta = *schedule.alternation_period;
    for (long m = 1;; ++m) {
      const double t = static_cast<double>(m) * ta;
      if (t >= t_end - kMerge) break;
      marks.push_back({t, 0});
    }
  }
  for (double t : sample_times)
    if (t > kMerge && t <= t_end + kMerge) marks.push_back({t, 2});
  marks.push_back({t_end, 3});
  std::stable_sort(marks.begin(), marks.end(),
                   [](const Mark& a, const Mark& b) { return a.t < b.t; });

  double prev = 0.0;
  for (std::size_t i = 0; i < marks.size();) {
    const double t = marks[i].t;
    bool pulse = false, record = false;
    std::size_t j = i;
    for (; j < marks.size() && marks[j].t - t <= kMerge; ++j) {
      if (marks[j].kind == 1) pulse = true;
      if (marks[j].kind == 2) record = true;
    }
    if (t > prev + kMerge || (t <= kMerge && t_end <= kMerge)) {
      Segment s;
      s.t0 = prev;
      s.t1 = t;
      s.sign = schedule.sign_at(0.5 * (prev + t));
      s.pulse_after = pulse;
      s.record_after = record;
      tl.segments.push_back(s);
      prev = t;
    } else if (!tl.segments.empty()) {
      tl.segments.back().pulse_after = tl.segments.back().pulse_after || pulse;
      tl.segments.back().record_after = tl.segments.back().record_after || record;
    }
    i = j;
  }
  return tl;
}

}  // namespace rpsim
