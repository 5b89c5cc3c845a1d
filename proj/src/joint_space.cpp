#include "rpsim/joint_space.hpp"

#include <cmath>
#include <sstream>

#include "rpsim/errors.hpp"
#include "rpsim/hamiltonian.hpp"
#include "rpsim/spin_operators.hpp"
#include "rpsim/state.hpp"
#include "rpsim/units.hpp"

namespace rpsim {

JointSpace::JointSpace(RadicalSpec radical1, RadicalSpec radical2, std::size_t dimension_cap)
    : r1_(std::move(radical1)), r2_(std::move(radical2)) {
  validate(r1_);
  validate(r2_);
  m1_ = r1_.nuclear_dim();
  m2_ = r2_.nuclear_dim();
  dim_ = 4 * m1_ * m2_;
  if (dim_ > dimension_cap) {
    std::ostringstream os;
    os << "joint space needs dimension " << dim_ << " but the cap is " << dimension_cap;
    throw ConfigError(os.str());
  }
}

CMat JointSpace::hamiltonian(const Vec3& field_mT) const {
  const CMat h1 = build_hamiltonian(r1_, field_mT).to_dense();
  const CMat h2 = build_hamiltonian(r2_, field_mT).to_dense();
  const auto d1 = h1.rows(), d2 = h2.rows();
  return kron(h1, CMat::Identity(d2, d2)) + kron(CMat::Identity(d1, d1), h2);
}

CMat JointSpace::electron_op(int radical, const Mat2c& op) const {
  const CMat o = op;
  const auto m1 = static_cast<Eigen::Index>(m1_), m2 = static_cast<Eigen::Index>(m2_);
  if (radical == 1)
    return kron(kron(o, CMat::Identity(m1, m1)), CMat::Identity(2 * m2, 2 * m2));
  return kron(CMat::Identity(2 * m1, 2 * m1), kron(o, CMat::Identity(m2, m2)));
}

CMat JointSpace::field_derivative(const Vec3& direction) const {
  const auto& p = pauli_basis();
  Mat2c s = Mat2c::Zero();
  for (int a = 0; a < 3; ++a) s += 0.5 * direction(a) * p[a + 1];
  return -units::kGammaE * (electron_op(1, s) + electron_op(2, s));
}

CMat JointSpace::initial_state(const TwoElectronState& electrons) const {
  CMat rho = CMat::Zero(dim_, dim_);
  const auto m1 = static_cast<Eigen::Index>(m1_), m2 = static_cast<Eigen::Index>(m2_);
  const double w = 1.0 / static_cast<double>(m1_ * m2_);
  auto idx = [&](int e1, Eigen::Index n1, int e2, Eigen::Index n2) {
    return ((e1 * m1 + n1) * 2 + e2) * m2 + n2;
  };
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) {
          const cplx v = electrons.rho(a1 * 2 + a2, b1 * 2 + b2) * w;
          if (v == 0.0) continue;
          for (Eigen::Index n1 = 0; n1 < m1; ++n1)
            for (Eigen::Index n2 = 0; n2 < m2; ++n2)
              rho(idx(a1, n1, a2, n2), idx(b1, n1, b2, n2)) = v;
        }
  return rho;
}

TwoElectronState JointSpace::reduce(const CMat& rho) const {
  const auto m1 = static_cast<Eigen::Index>(m1_), m2 = static_cast<Eigen::Index>(m2_);
  auto idx = [&](int e1, Eigen::Index n1, int e2, Eigen::Index n2) {
    return ((e1 * m1 + n1) * 2 + e2) * m2 + n2;
  };
  TwoElectronState out;
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) {
          cplx v = 0.0;
          for (Eigen::Index n1 = 0; n1 < m1; ++n1)
            for (Eigen::Index n2 = 0; n2 < m2; ++n2) v += rho(idx(a1, n1, a2, n2), idx(b1, n1, b2, n2));
          out.rho(a1 * 2 + a2, b1 * 2 + b2) = v;
        }
  return out;
}

CMat JointSpace::pulse(const PulseSequence& p) const {
  const Mat2c u = p.unitary();
  const Mat2c id = Mat2c::Identity();
  return electron_op(1, p.acts_on(1) ? u : id) * electron_op(2, p.acts_on(2) ? u : id);
}

CMat JointSpace::singlet_projector() const {
  const auto m1 = static_cast<Eigen::Index>(m1_), m2 = static_cast<Eigen::Index>(m2_);
  TwoElectronState s = singlet_state();
  return initial_state(s) * static_cast<double>(m1 * m2);
}

CMat JointSpace::evolve(const CMat& rho, const FieldSchedule& schedule,
                        const std::optional<PulseSequence>& pulses, double t) const {
  const Timeline tl = build_timeline(schedule, pulses, t);
  Eigen::SelfAdjointEigenSolver<CMat> plus(hamiltonian(schedule.vector()));
  std::optional<Eigen::SelfAdjointEigenSolver<CMat>> minus;
  if (schedule.alternation_period) minus.emplace(hamiltonian(-schedule.vector()));
  const CMat pu = pulses ? pulse(*pulses) : CMat();
  CMat r = rho;
  if (pulses && tl.pulse_at_start) r = pu * r * pu.adjoint();
  for (const auto& seg : tl.segments) {
    const double len = seg.t1 - seg.t0;
    if (len > 0.0) {
      const auto& es = seg.sign > 0 ? plus : *minus;
      const CVec ph = (-kI * len * es.eigenvalues().cast<cplx>()).array().exp();
      const CMat u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
      r = u * r * u.adjoint();
    }
    if (pulses && seg.pulse_after) r = pu * r * pu.adjoint();
  }
  return r;
}

namespace {

// 24-point Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(units::kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

IntervalSensitivity interval_sensitivity(const JointSpace& space, const CMat& rho_t0,
                                         const Vec3& direction, double field_mT, double k_ns,
                                         double t0, const std::vector<double>& taus) {
  Eigen::SelfAdjointEigenSolver<CMat> es(space.hamiltonian(field_mT * direction));
  const CMat& v = es.eigenvectors();
  const Eigen::VectorXd& lam = es.eigenvalues();
  const CMat a = v.adjoint() * space.field_derivative(direction) * v;
  const CMat rho = v.adjoint() * rho_t0 * v;
  const CMat ps = v.adjoint() * space.singlet_projector() * v;
  const auto d = lam.size();

  auto dfdb = [&](double dt) {
    const CVec ph = (-kI * dt * lam.cast<cplx>()).array().exp();
    CMat du(d, d);
    for (Eigen::Index p = 0; p < d; ++p)
      for (Eigen::Index q = 0; q < d; ++q) {
        const double dl = lam(p) - lam(q);
        const cplx g = std::abs(dl) < 1e-12 ? -kI * dt * ph(p) : (ph(p) - ph(q)) / dl;
        du(p, q) = a(p, q) * g;
      }
    // f = Tr[U rho U^+ P], U diagonal in this basis
    const CMat uconj = ph.conjugate().asDiagonal();
    return 2.0 * (du * rho * uconj * ps).trace().real();
  };

  std::vector<double> gx, gw;
  gauss_legendre(24, gx, gw);
  IntervalSensitivity out;
  out.f_s_at_t0 = (rho * ps).trace().real();
  for (double tau : taus) {
    double acc = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double dt = 0.5 * tau * (gx[i] + 1.0);
      acc += gw[i] * k_ns * std::exp(-k_ns * (t0 + dt)) * dfdb(dt);
    }
    out.tau.push_back(tau);
    out.lambda.push_back(0.5 * tau * acc);
  }
  out.slope = loglog_slope(out.tau, out.lambda);
  return out;
}

}  // namespace rpsim
