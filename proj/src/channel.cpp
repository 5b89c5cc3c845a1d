#include "rpsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rpsim/errors.hpp"
#include "rpsim/evolve.hpp"
#include "rpsim/kernels.hpp"
#include "rpsim/rng.hpp"
#include "rpsim/spin_operators.hpp"

namespace rpsim {

Mat4c ElectronChannel::superoperator() const {
  const auto& p = pauli_basis();
  Mat4c s = Mat4c::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int cp = 0; cp < 2; ++cp) {
          cplx v = 0.0;
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) v += p[j](b, a) * transfer(i, j) * p[i](c, cp);
          s(c * 2 + cp, a * 2 + b) = 0.5 * v;
        }
  return s;
}

ElectronChannel ElectronChannel::from_superoperator(const Mat4c& s, double time) {
  const auto& p = pauli_basis();
  ElectronChannel ch;
  ch.time = time;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      cplx v = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c)
            for (int cp = 0; cp < 2; ++cp)
              v += p[j](a, b) * p[i](cp, c) * s(c * 2 + cp, a * 2 + b);
      ch.transfer(i, j) = 0.5 * v.real();
    }
  return ch;
}

Mat2c ElectronChannel::apply(const Mat2c& rho) const {
  const auto& p = pauli_basis();
  Eigen::Vector4d r;
  for (int j = 0; j < 4; ++j) r(j) = (rho * p[j]).trace().real();
  const Eigen::Vector4d out = transfer * r;
  Mat2c res = Mat2c::Zero();
  for (int i = 0; i < 4; ++i) res += 0.5 * out(i) * p[i];
  return res;
}

Mat4c choi_matrix(const ElectronChannel& ch) {
  const Mat4c s = ch.superoperator();
  Mat4c c;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) c(a * 2 + x, b * 2 + y) = s(x * 2 + y, a * 2 + b);
  return c;
}

void check_channel(const ElectronChannel& ch) {
  const double tp = (ch.transfer.row(0) - Eigen::RowVector4d(1, 0, 0, 0)).cwiseAbs().maxCoeff();
  if (tp > 1e-10) {
    std::ostringstream os;
    os << "channel is not trace preserving (first row deviates by " << tp << ")";
    throw InvariantError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat4c> es(choi_matrix(ch), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) {
    std::ostringstream os;
    os << "channel is not completely positive (Choi eigenvalue " << es.eigenvalues().minCoeff()
       << ")";
    throw InvariantError(os.str());
  }
}

BathStrategy BathStrategy::exact(bool grouping) {
  BathStrategy b;
  b.kind = Kind::exact;
  b.group_equivalent = grouping;
  return b;
}

BathStrategy BathStrategy::sampled(std::size_t n, std::uint64_t seed) {
  BathStrategy b;
  b.kind = Kind::sampled;
  b.n_samples = n;
  b.seed = seed;
  return b;
}

namespace {

std::size_t largest_block(const std::vector<BathBlock>& blocks) {
  std::size_t m = 0;
  for (const auto& b : blocks) m = std::max(m, b.effective.nuclear_dim());
  return m;
}

std::vector<BathBlock> exact_blocks(const RadicalSpec& radical, bool grouping) {
  return grouping ? equivalent_nuclei_blocks(radical) : single_block(radical);
}

}  // namespace

bool uses_sampling(const RadicalSpec& radical, const BathStrategy& bath) {
  switch (bath.kind) {
    case BathStrategy::Kind::exact: return false;
    case BathStrategy::Kind::sampled: return true;
    case BathStrategy::Kind::automatic:
      return largest_block(exact_blocks(radical, bath.group_equivalent)) > bath.exact_cap;
  }
  return false;
}

std::vector<BathBlock> bath_blocks(const RadicalSpec& radical, const BathStrategy& bath) {
  if (uses_sampling(radical, bath)) return single_block(radical);
  auto blocks = exact_blocks(radical, bath.group_equivalent);
  const std::size_t m = largest_block(blocks);
  if (m > bath.exact_cap) {
    std::ostringstream os;
    os << "exact bath summation over nuclear dimension " << m << " exceeds the cap of "
       << bath.exact_cap << "; use a sampled bath";
    throw ConfigError(os.str());
  }
  return blocks;
}

Mat4c block_superoperator(const CMat& u) {
  const auto m = static_cast<std::size_t>(u.rows() / 2);
  std::vector<cplx> r(16 * m);
  kernels::reduce_pairs_parallel(u.data(), u.rows(), m, r.data());
  Mat4c s = Mat4c::Zero();
  for (std::size_t n = 0; n < m; ++n)
    for (int ab = 0; ab < 4; ++ab)
      for (int cc = 0; cc < 4; ++cc) s(cc, ab) += r[n * 16 + ab * 4 + cc];
  return s / static_cast<double>(m);
}

ElectronChannel tomograph_channel(const RadicalSpec& radical, const FieldSchedule& schedule,
                                  const std::optional<PulseSequence>& pulses, double t,
                                  const BathStrategy& bath, int radical_index, double tol) {
  if (t < 0.0) throw ConfigError("channel time must be non-negative");
  schedule.validate();
  if (pulses) pulses->validate();
  validate(radical);
  const Timeline tl = build_timeline(schedule, pulses, t);
  std::optional<Mat2c> pulse;
  if (pulses && pulses->acts_on(radical_index)) pulse = pulses->unitary();
  const Mat2c* pu = pulse ? &*pulse : nullptr;

  ElectronChannel out;
  if (!uses_sampling(radical, bath)) {
    const auto blocks = bath_blocks(radical, bath);
    std::vector<Mat4c> parts(blocks.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& eff = blocks[b].effective;
      const SignedHamiltonians h(
          [&eff](const Vec3& f) { return build_hamiltonian(eff, f); }, schedule);
      const auto d = static_cast<Eigen::Index>(eff.hilbert_dim());
      const CMat u = evolve_timeline(h, tl, pu, CMat::Identity(d, d), tol);
      parts[b] = blocks[b].weight * block_superoperator(u);
    }
    Mat4c s = Mat4c::Zero();
    for (const auto& p : parts) s += p;
    out = ElectronChannel::from_superoperator(s, t);
  } else {
    if (bath.n_samples < 2) throw ConfigError("a sampled bath needs at least 2 samples");
    const SignedHamiltonians h(
        [&radical](const Vec3& f) { return build_hamiltonian(radical, f); }, schedule);
    const std::size_t m = radical.nuclear_dim();
    const auto d = static_cast<Eigen::Index>(radical.hilbert_dim());
    std::vector<Mat4> samples(bath.n_samples);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t s = 0; s < bath.n_samples; ++s) {
      auto g = make_stream(bath.seed, s);
      const auto n = static_cast<Eigen::Index>(uniform_index(g, m));
      CMat cols = CMat::Zero(d, 2);
      cols(n, 0) = 1.0;
      cols(static_cast<Eigen::Index>(m) + n, 1) = 1.0;
      const CMat psi = evolve_timeline(h, tl, pu, cols, tol);
      cplx r[16];
      kernels::reduce_pairs_serial(psi.data(), d, 1, r);
      Mat4c sup;
      for (int ab = 0; ab < 4; ++ab)
        for (int cc = 0; cc < 4; ++cc) sup(cc, ab) = r[ab * 4 + cc];
      samples[s] = ElectronChannel::from_superoperator(sup, t).transfer;
    }
    Mat4 mean = Mat4::Zero();
    for (const auto& x : samples) mean += x;
    mean /= static_cast<double>(samples.size());
    Mat4 var = Mat4::Zero();
    for (const auto& x : samples) var += (x - mean).cwiseAbs2();
    var /= static_cast<double>(samples.size() - 1);
    out.transfer = mean;
    out.time = t;
    out.standard_error = (var / static_cast<double>(samples.size())).cwiseSqrt();
  }
  if (radical.isotropic()) {
    const Mat4c s = out.superoperator();
    out.iso = IsoParams{s(0, 0).real(), s(1, 1)};
  }
  const Vec3 f = schedule.vector();
  out.zero_block_applicable = radical.isotropic() && !pulses && std::abs(f.x()) < 1e-12 &&
                              std::abs(f.y()) < 1e-12;
  return out;
}

ZeroBlockReport verify_zero_blocks(const ElectronChannel& ch) {
  ZeroBlockReport rep;
  rep.applicable = ch.zero_block_applicable;
  if (!rep.applicable) return rep;
  const Mat4c s = ch.superoperator();
  double worst = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int cp = 0; cp < 2; ++cp) {
          const bool allowed = (a == b && c == cp) || (a != b && c == a && cp == b);
          if (!allowed) worst = std::max(worst, std::abs(s(c * 2 + cp, a * 2 + b)));
        }
  worst = std::max(worst, std::abs(s(0, 0) - s(3, 3)));
  rep.max_forbidden = worst;
  rep.tolerance = ch.standard_error ? 4.0 * ch.standard_error->maxCoeff() : 1e-9;
  rep.pass = worst <= rep.tolerance;
  return rep;
}

Mat4 compose_pauli(const Mat4& m1, const Mat4& m2, const Mat4& r) {
  return m1 * r * m2.transpose();
}

TwoElectronState compose_on_pair(const ElectronChannel& ch1, const ElectronChannel& ch2,
                                 const TwoElectronState& initial) {
  if (std::abs(ch1.time - ch2.time) > 1e-12) {
    std::ostringstream os;
    os << "channels refer to different times (" << ch1.time << " ns vs " << ch2.time << " ns)";
    throw ConfigError(os.str());
  }
  return TwoElectronState::from_pauli(compose_pauli(ch1.transfer, ch2.transfer, initial.pauli()));
}

}  // namespace rpsim
