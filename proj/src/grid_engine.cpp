#include "rpsim/engines.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "rpsim/chebyshev.hpp"
#include "rpsim/errors.hpp"
#include "rpsim/evolve.hpp"
#include "rpsim/kernels.hpp"
#include "rpsim/rng.hpp"

namespace rpsim {

std::vector<double> UniformGrid::times() const {
  std::vector<double> t(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) t[j] = time(j);
  return t;
}

Mat4 singlet_kernel(const Mat4& m1, const Mat4& m2) {
  Mat4 g = Mat4::Zero();
  for (int k = 0; k < 4; ++k) g += kSingletWeights[k] * m1.row(k).transpose() * m2.row(k);
  return g;
}

namespace {

std::size_t grid_index(const UniformGrid& grid, double t) {
  return static_cast<std::size_t>(std::llround(t / grid.dt));
}

Mat4c pair_superoperator(const CMat& cols, std::size_t npairs) {
  std::vector<cplx> r(16 * npairs);
  kernels::reduce_pairs_serial(cols.data(), cols.rows(), npairs, r.data());
  Mat4c s = Mat4c::Zero();
  for (std::size_t n = 0; n < npairs; ++n)
    for (int ab = 0; ab < 4; ++ab)
      for (int cc = 0; cc < 4; ++cc) s(cc, ab) += r[n * 16 + ab * 4 + cc];
  return s;
}

// Superoperator series of one exact block, weighted and normalized.
std::vector<Mat4c> block_series(const BathBlock& block, const FieldSchedule& schedule,
                                const Timeline& tl, const Mat2c* pulse, const UniformGrid& grid,
                                double tol, std::size_t dense_limit) {
  const auto& eff = block.effective;
  const SignedHamiltonians h([&eff](const Vec3& f) { return build_hamiltonian(eff, f); },
                             schedule);
  const auto d = static_cast<Eigen::Index>(eff.hilbert_dim());
  const bool dense = static_cast<std::size_t>(d) <= dense_limit;
  const double scale = block.weight / static_cast<double>(eff.nuclear_dim());
  std::vector<Mat4c> out(grid.steps + 1, Mat4c::Zero());

  std::map<std::pair<int, long long>, CMat> cache;
  CMat u = CMat::Identity(d, d);
  if (pulse && tl.pulse_at_start) kernels::electron_rotate_serial(*pulse, u.data(), d, d);
  out[0] = scale * pair_superoperator(u, d / 2);
  CMat tmp(d, d);
  for (const auto& seg : tl.segments) {
    const double len = seg.t1 - seg.t0;
    if (len > 0.0) {
      if (dense) {
        const auto key = std::make_pair(seg.sign, std::llround(len * 1e9));
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, chebyshev_unitary(h.at(seg.sign), len, tol)).first;
        tmp.noalias() = it->second * u;
        u.swap(tmp);
      } else {
        u = chebyshev_propagate(h.at(seg.sign), u, len, tol);
      }
    }
    if (pulse && seg.pulse_after) kernels::electron_rotate_serial(*pulse, u.data(), d, d);
    if (seg.record_after) out[grid_index(grid, seg.t1)] = scale * pair_superoperator(u, d / 2);
  }
  return out;
}

}  // namespace

std::vector<Mat4> grid_channel_series(const RadicalSpec& radical, int radical_index,
                                      const FieldSchedule& schedule,
                                      const std::optional<PulseSequence>& pulses,
                                      const UniformGrid& grid, const BathStrategy& bath,
                                      double tol, std::size_t dense_limit) {
  if (!(grid.dt > 0.0) || grid.steps == 0) throw ConfigError("time grid must be non-empty");
  validate(radical);
  schedule.validate();
  if (pulses) pulses->validate();
  const Timeline tl = build_timeline(schedule, pulses, grid.t_end(), grid.times());
  std::optional<Mat2c> pu;
  if (pulses && pulses->acts_on(radical_index)) pu = pulses->unitary();
  const Mat2c* pulse = pu ? &*pu : nullptr;

  std::vector<Mat4c> total(grid.steps + 1, Mat4c::Zero());
  if (!uses_sampling(radical, bath)) {
    const auto blocks = bath_blocks(radical, bath);
    std::vector<std::vector<Mat4c>> parts(blocks.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t b = 0; b < blocks.size(); ++b)
      parts[b] = block_series(blocks[b], schedule, tl, pulse, grid, tol, dense_limit);
    for (const auto& p : parts)
      for (std::size_t j = 0; j <= grid.steps; ++j) total[j] += p[j];
  } else {
    const SignedHamiltonians h([&radical](const Vec3& f) { return build_hamiltonian(radical, f); },
                               schedule);
    const std::size_t m = radical.nuclear_dim();
    const auto d = static_cast<Eigen::Index>(radical.hilbert_dim());
    const std::size_t n = bath.n_samples;
    if (n == 0) throw ConfigError("a sampled bath needs at least one sample");
    // One chunk of samples at a time keeps memory bounded; the reduction order
    // is the sample order regardless of scheduling.
    constexpr std::size_t kChunk = 16;
    for (std::size_t c0 = 0; c0 < n; c0 += kChunk) {
      const std::size_t c1 = std::min(n, c0 + kChunk);
      std::vector<std::vector<Mat4c>> parts(c1 - c0);
#pragma omp parallel for schedule(dynamic)
      for (std::size_t s = c0; s < c1; ++s) {
        auto g = make_stream(bath.seed, s);
        const auto idx = static_cast<Eigen::Index>(uniform_index(g, m));
        CMat cols = CMat::Zero(d, 2);
        cols(idx, 0) = 1.0;
        cols(static_cast<Eigen::Index>(m) + idx, 1) = 1.0;
        auto& out = parts[s - c0];
        out.assign(grid.steps + 1, Mat4c::Zero());
        if (pulse && tl.pulse_at_start) kernels::electron_rotate_serial(*pulse, cols.data(), d, 2);
        out[0] = pair_superoperator(cols, 1);
        for (const auto& seg : tl.segments) {
          const double len = seg.t1 - seg.t0;
          if (len > 0.0) cols = chebyshev_propagate(h.at(seg.sign), cols, len, tol);
          if (pulse && seg.pulse_after) kernels::electron_rotate_serial(*pulse, cols.data(), d, 2);
          if (seg.record_after) out[grid_index(grid, seg.t1)] = pair_superoperator(cols, 1);
        }
      }
      for (const auto& p : parts)
        for (std::size_t j = 0; j <= grid.steps; ++j) total[j] += p[j];
    }
    for (auto& s : total) s /= static_cast<double>(n);
  }
  std::vector<Mat4> series(grid.steps + 1);
  for (std::size_t j = 0; j <= grid.steps; ++j)
    series[j] = ElectronChannel::from_superoperator(total[j], grid.time(j)).transfer;
  return series;
}

}  // namespace rpsim
