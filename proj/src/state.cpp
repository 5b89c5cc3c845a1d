#include "rpsim/state.hpp"

#include <cmath>
#include <sstream>

#include "rpsim/errors.hpp"
#include "rpsim/spin_operators.hpp"

namespace rpsim {

namespace {

TwoElectronState pure(const Eigen::Vector4cd& v) {
  TwoElectronState s;
  const Eigen::Vector4cd n = v.normalized();
  s.rho = n * n.adjoint();
  return s;
}

}  // namespace

Mat4c pauli_product(int i, int j) {
  const auto& p = pauli_basis();
  Mat4c out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) out(a * 2 + c, b * 2 + d) = p[i](a, b) * p[j](c, d);
  return out;
}

void TwoElectronState::validate() const {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvariantError("two-electron state is not Hermitian");
  if (std::abs(rho.trace() - cplx{1.0, 0.0}) > 1e-12) {
    std::ostringstream os;
    os << "two-electron state has trace " << rho.trace().real() << "; expected 1";
    throw InvariantError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat4c> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    std::ostringstream os;
    os << "two-electron state has negative eigenvalue " << es.eigenvalues().minCoeff();
    throw InvariantError(os.str());
  }
}

Mat4 TwoElectronState::pauli() const {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = (rho * pauli_product(i, j)).trace().real();
  return r;
}

TwoElectronState TwoElectronState::from_pauli(const Mat4& r) {
  TwoElectronState s;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (r(i, j) != 0.0) s.rho += (0.25 * r(i, j)) * pauli_product(i, j);
  return s;
}

TwoElectronState singlet_state() { return pure(Eigen::Vector4cd(0, 1, -1, 0)); }
TwoElectronState triplet_zero_state() { return pure(Eigen::Vector4cd(0, 1, 1, 0)); }
TwoElectronState triplet_plus_state() { return pure(Eigen::Vector4cd(1, 0, 0, 0)); }
TwoElectronState triplet_minus_state() { return pure(Eigen::Vector4cd(0, 0, 0, 1)); }

TwoElectronState classical_mixture_state() {
  TwoElectronState s;
  s.rho(1, 1) = 0.5;
  s.rho(2, 2) = 0.5;
  return s;
}

TwoElectronState product_state(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
  const Eigen::Vector2cd an = a.normalized();
  const Eigen::Vector2cd bn = b.normalized();
  Eigen::Vector4cd v;
  v << an(0) * bn(0), an(0) * bn(1), an(1) * bn(0), an(1) * bn(1);
  return pure(v);
}

const Mat4c& singlet_projector() {
  static const Mat4c p = singlet_state().rho;
  return p;
}

}  // namespace rpsim
