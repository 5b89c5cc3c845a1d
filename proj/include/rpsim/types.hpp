#pragma once

#include <complex>

#include <Eigen/Dense>

namespace rpsim {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat2c = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4d;
using Mat4c = Eigen::Matrix4cd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};

}  // namespace rpsim
