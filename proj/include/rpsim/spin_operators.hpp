#pragma once

#include <array>

#include "rpsim/types.hpp"

namespace rpsim {

enum class Axis { x = 0, y = 1, z = 2 };

/// One Cartesian component of a spin operator, hbar = 1.
struct SpinOperator {
  int multiplicity = 2;
  Axis component = Axis::z;
  CMat matrix;
};

/// Spin operator for a given multiplicity (2s+1) and axis, in the |m = s, s-1, ..., -s> basis.
SpinOperator spin_operator(int multiplicity, Axis component);

/// (S_x, S_y, S_z) as dense matrices.
std::array<CMat, 3> spin_matrices(int multiplicity);

/// Pauli matrices (sigma_0 = identity, sigma_x, sigma_y, sigma_z).
const std::array<Mat2c, 4>& pauli_basis();

/// Kronecker product a (x) b.
CMat kron(const CMat& a, const CMat& b);

/// Ideal rotation exp(-i angle n.sigma/2) of a spin-1/2.
Mat2c rotation(const Vec3& axis, double angle);

}  // namespace rpsim
