#include "rpsim/spin_operators.hpp"

#include <cmath>
#include <stdexcept>

#include "rpsim/errors.hpp"

namespace rpsim {

std::array<CMat, 3> spin_matrices(int multiplicity) {
  if (multiplicity < 1) throw ConfigError("spin multiplicity must be >= 1");
  const int d = multiplicity;
  const double s = 0.5 * (d - 1);
  CMat sp = CMat::Zero(d, d);  // S_+
  CMat sz = CMat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double m = s - i;
    sz(i, i) = m;
    if (i > 0) {
      // <m+1|S_+|m> with m the state at row i
      sp(i - 1, i) = std::sqrt(s * (s + 1) - m * (m + 1));
    }
  }
  const CMat sm = sp.adjoint();
  CMat sx = 0.5 * (sp + sm);
  CMat sy = -0.5 * kI * (sp - sm);
  return {sx, sy, sz};
}

SpinOperator spin_operator(int multiplicity, Axis component) {
  auto ops = spin_matrices(multiplicity);
  return {multiplicity, component, ops[static_cast<int>(component)]};
}

const std::array<Mat2c, 4>& pauli_basis() {
  static const std::array<Mat2c, 4> basis = [] {
    std::array<Mat2c, 4> p;
    p[0] << 1, 0, 0, 1;
    p[1] << 0, 1, 1, 0;
    p[2] << 0, -kI, kI, 0;
    p[3] << 1, 0, 0, -1;
    return p;
  }();
  return basis;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat2c rotation(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0)) throw ConfigError("rotation axis must be nonzero");
  const Vec3 u = axis / n;
  const auto& p = pauli_basis();
  const Mat2c ns = u.x() * p[1] + u.y() * p[2] + u.z() * p[3];
  return std::cos(0.5 * angle) * p[0] - kI * std::sin(0.5 * angle) * ns;
}

}  // namespace rpsim
