#include "rpsim/engines.hpp"

#include <cmath>
#include <sstream>

#include "rpsim/errors.hpp"
#include "rpsim/evolve.hpp"
#include "rpsim/kernels.hpp"
#include "rpsim/spin_operators.hpp"

namespace rpsim {

namespace {

struct Eigensystem {
  Eigen::VectorXd lambda;
  CMat v;
  std::array<CMat, 4> q;  // Q_k = sum_cc' (sigma_k)_{c'c} A_c^T conj(A_c')
};

Eigensystem eigensystem(const HamiltonianHandle& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h.to_dense());
  Eigensystem e;
  e.lambda = es.eigenvalues();
  e.v = es.eigenvectors();
  const auto m = static_cast<Eigen::Index>(h.nuclear_dim());
  const auto& p = pauli_basis();
  std::array<std::array<CMat, 2>, 2> qcc;
  for (int c = 0; c < 2; ++c)
    for (int cp = 0; cp < 2; ++cp)
      qcc[c][cp] = e.v.middleRows(c * m, m).transpose() * e.v.middleRows(cp * m, m).conjugate();
  for (int k = 0; k < 4; ++k) {
    e.q[k] = CMat::Zero(e.v.rows(), e.v.cols());
    for (int c = 0; c < 2; ++c)
      for (int cp = 0; cp < 2; ++cp)
        if (p[k](cp, c) != 0.0) e.q[k] += p[k](cp, c) * qcc[c][cp];
  }
  return e;
}

CMat evolve_dense(const Eigensystem& e, const CMat& u, double len) {
  const CVec ph = (-kI * len * e.lambda.cast<cplx>()).array().exp();
  return e.v * (ph.asDiagonal() * (e.v.adjoint() * u));
}

struct BlockState {
  BathBlock block;
  std::optional<SignedHamiltonians> h;
  Eigensystem plus, minus;
  CMat u;
  const Eigensystem& at(int sign) const { return sign > 0 ? plus : minus; }
};

std::vector<BlockState> prepare(const RadicalSpec& radical, const FieldSchedule& schedule,
                                const BathStrategy& bath) {
  if (uses_sampling(radical, bath))
    throw ConfigError("the spectral engine needs an exactly summed bath");
  validate(radical);
  auto blocks = bath_blocks(radical, bath);
  std::vector<BlockState> out(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto& s = out[b];
    s.block = blocks[b];
    const auto& eff = s.block.effective;
    if (eff.hilbert_dim() > kDenseLimit) {
      std::ostringstream os;
      os << "block dimension " << eff.hilbert_dim() << " is too large for the spectral engine";
      throw ConfigError(os.str());
    }
    s.h.emplace([&eff](const Vec3& f) { return build_hamiltonian(eff, f); }, schedule);
    s.plus = eigensystem(s.h->plus);
    if (s.h->minus) s.minus = eigensystem(*s.h->minus);
    const auto d = static_cast<Eigen::Index>(eff.hilbert_dim());
    s.u = CMat::Identity(d, d);
  }
  return out;
}

Mat4c weighted_superoperator(const BlockState& s) {
  return s.block.weight * block_superoperator(s.u);
}

// Expansion M_ki(tau) = sum_pq C_ki(p,q) exp(-i (l_p - l_q) tau) of one block
// over a segment that starts with propagator U.
std::array<CMat, 16> segment_coefficients(const BlockState& s, const Eigensystem& e) {
  const auto m = static_cast<Eigen::Index>(s.block.effective.nuclear_dim());
  const CMat x = e.v.adjoint() * s.u;
  const auto& p = pauli_basis();
  std::array<std::array<CMat, 2>, 2> rab;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      rab[a][b] = x.middleCols(a * m, m) * x.middleCols(b * m, m).adjoint();
  std::array<CMat, 16> c;
  const double scale = s.block.weight / (2.0 * static_cast<double>(m));
  for (int i = 0; i < 4; ++i) {
    CMat ri = CMat::Zero(x.rows(), x.rows());
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        if (p[i](a, b) != 0.0) ri += p[i](a, b) * rab[a][b];
    for (int k = 0; k < 4; ++k) c[k * 4 + i] = scale * e.q[k].cwiseProduct(ri);
  }
  return c;
}

}  // namespace

std::vector<Mat4> spectral_channel_series(const RadicalSpec& radical, int radical_index,
                                          const FieldSchedule& schedule,
                                          const std::optional<PulseSequence>& pulses,
                                          const std::vector<double>& times,
                                          const BathStrategy& bath) {
  schedule.validate();
  if (pulses) pulses->validate();
  if (times.empty()) return {};
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ConfigError("sample times must be strictly ascending");
  if (times.front() < 0.0) throw ConfigError("sample times must be non-negative");
  auto blocks = prepare(radical, schedule, bath);
  const Timeline tl = build_timeline(schedule, pulses, times.back(), times);
  std::optional<Mat2c> pu;
  if (pulses && pulses->acts_on(radical_index)) pu = pulses->unitary();

  std::vector<std::vector<Mat4c>> parts(blocks.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto& s = blocks[b];
    const auto d = static_cast<Eigen::Index>(s.u.rows());
    auto& out = parts[b];
    out.reserve(times.size());
    if (pu && tl.pulse_at_start) kernels::electron_rotate_serial(*pu, s.u.data(), d, d);
    if (times.front() <= 1e-9) out.push_back(weighted_superoperator(s));
    for (const auto& seg : tl.segments) {
      if (seg.t1 > seg.t0) s.u = evolve_dense(s.at(seg.sign), s.u, seg.t1 - seg.t0);
      if (pu && seg.pulse_after) kernels::electron_rotate_serial(*pu, s.u.data(), d, d);
      if (seg.record_after) out.push_back(weighted_superoperator(s));
    }
  }
  std::vector<Mat4> series(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    Mat4c tot = Mat4c::Zero();
    for (const auto& p : parts) {
      if (p.size() != times.size()) throw InvariantError("sample times were merged by the timeline");
      tot += p[j];
    }
    series[j] = ElectronChannel::from_superoperator(tot, times[j]).transfer;
  }
  return series;
}

Mat4 spectral_response(const RadicalSpec& radical1, const RadicalSpec& radical2,
                       const FieldSchedule& schedule, const std::optional<PulseSequence>& pulses,
                       double k_ns, double t_end, const BathStrategy& bath) {
  if (!(k_ns > 0.0)) throw ConfigError("re-encounter rate must be positive");
  schedule.validate();
  if (pulses) pulses->validate();
  std::array<std::vector<BlockState>, 2> rad{prepare(radical1, schedule, bath),
                                             prepare(radical2, schedule, bath)};
  const Timeline tl = build_timeline(schedule, pulses, t_end);
  std::array<std::optional<Mat2c>, 2> pu;
  for (int r = 0; r < 2; ++r)
    if (pulses && pulses->acts_on(r + 1)) pu[r] = pulses->unitary();

  auto pulse_all = [&](int r) {
    if (!pu[r]) return;
    for (auto& s : rad[r]) {
      const auto d = static_cast<std::size_t>(s.u.rows());
      kernels::electron_rotate_serial(*pu[r], s.u.data(), d, d);
    }
  };
  if (tl.pulse_at_start) {
    pulse_all(0);
    pulse_all(1);
  }

  Mat4 w = Mat4::Zero();
  for (const auto& seg : tl.segments) {
    const double len = seg.t1 - seg.t0;
    if (len > 0.0) {
      // Radical 2 is flattened into a list of (frequency, 16 coefficients).
      std::vector<double> nu;
      std::vector<std::array<cplx, 16>> c2;
      for (const auto& s : rad[1]) {
        const auto& e = s.at(seg.sign);
        const auto coef = segment_coefficients(s, e);
        const auto d = e.lambda.size();
        for (Eigen::Index p = 0; p < d; ++p)
          for (Eigen::Index q = 0; q < d; ++q) {
            std::array<cplx, 16> v;
            double mag = 0.0;
            for (int x = 0; x < 16; ++x) {
              v[x] = coef[x](p, q);
              mag = std::max(mag, std::abs(v[x]));
            }
            if (mag == 0.0) continue;
            nu.push_back(e.lambda(p) - e.lambda(q));
            c2.push_back(v);
          }
      }
      const double decay = std::exp(-k_ns * len);
      const double prefactor = k_ns * std::exp(-k_ns * seg.t0);
      std::vector<Mat4> partial(rad[0].size(), Mat4::Zero());
#pragma omp parallel for schedule(dynamic)
      for (std::size_t b = 0; b < rad[0].size(); ++b) {
        const auto& s = rad[0][b];
        const auto& e = s.at(seg.sign);
        const auto coef = segment_coefficients(s, e);
        const auto d = e.lambda.size();
        const CVec ph = (-kI * len * e.lambda.cast<cplx>()).array().exp();
        CMat jm(d, d);
        Mat4 acc = Mat4::Zero();
        for (std::size_t r = 0; r < nu.size(); ++r) {
          const cplx ph2 = std::exp(-kI * (nu[r] * len));
          for (Eigen::Index q = 0; q < d; ++q)
            for (Eigen::Index p = 0; p < d; ++p) {
              const cplx z{k_ns, e.lambda(p) - e.lambda(q) + nu[r]};
              jm(p, q) = (1.0 - decay * ph(p) * std::conj(ph(q)) * ph2) / z;
            }
          for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i) {
              const cplx g = coef[k * 4 + i].cwiseProduct(jm).sum();
              for (int j = 0; j < 4; ++j)
                acc(i, j) += kSingletWeights[k] * (g * c2[r][k * 4 + j]).real();
            }
        }
        partial[b] = acc;
      }
      for (const auto& p : partial) w += prefactor * p;
      for (auto& r : rad)
        for (auto& s : r) s.u = evolve_dense(s.at(seg.sign), s.u, len);
    }
    if (seg.pulse_after) {
      pulse_all(0);
      pulse_all(1);
    }
  }
  std::array<Mat4, 2> m;
  for (int r = 0; r < 2; ++r) {
    Mat4c tot = Mat4c::Zero();
    for (const auto& s : rad[r]) tot += weighted_superoperator(s);
    m[r] = ElectronChannel::from_superoperator(tot, t_end).transfer;
  }
  w += std::exp(-k_ns * t_end) * singlet_kernel(m[0], m[1]);
  return w;
}

}  // namespace rpsim
