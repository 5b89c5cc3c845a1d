#include "rpsim/hamiltonian.hpp"

#include <sstream>

#include "rpsim/errors.hpp"
#include "rpsim/spin_operators.hpp"
#include "rpsim/units.hpp"

namespace rpsim {

HamiltonianHandle::HamiltonianHandle(RadicalSpec radical, const Vec3& field_mT,
                                     std::size_t dimension_cap)
    : field_(field_mT) {
  if (!field_mT.allFinite()) throw ConfigError("magnetic field must be finite");
  validate(radical, dimension_cap);

  const double g = units::kGammaE;
  auto op = std::make_shared<kernels::KroneckerOperator>();
  op->nuclear_dim = radical.nuclear_dim();
  op->dim = 2 * op->nuclear_dim;

  const auto s = spin_matrices(2);
  Mat2c zeeman = Mat2c::Zero();
  for (int a = 0; a < 3; ++a) zeeman -= g * field_mT(a) * s[a].topLeftCorner<2, 2>();
  op->electron = zeeman;

  double bound = g * field_mT.norm();
  std::size_t stride = op->nuclear_dim;
  for (const auto& n : radical.nuclei) {
    const auto d = static_cast<std::size_t>(n.multiplicity);
    stride /= d;
    const auto iop = spin_matrices(n.multiplicity);
    CMat local = CMat::Zero(2 * d, 2 * d);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double lam = n.hyperfine(a, b);
        if (lam == 0.0) continue;
        local += g * lam * kron(s[a], iop[b]);
      }
    kernels::ElectronNucleusTerm term;
    term.nuc_dim = d;
    term.stride = stride;
    for (int c = 0; c < local.cols(); ++c)
      for (int r = 0; r < local.rows(); ++r)
        if (std::abs(local(r, c)) > 0.0) term.entries.push_back({r, c, local(r, c)});
    op->terms.push_back(std::move(term));
    const double sj = 0.5 * (n.multiplicity - 1);
    bound += g * 0.5 * sj * n.hyperfine.cwiseAbs().sum();
  }
  bound_ = bound;
  op_ = std::move(op);
  radical_ = std::make_shared<const RadicalSpec>(std::move(radical));
}

void HamiltonianHandle::apply(const CMat& in, CMat& out) const {
  if (static_cast<std::size_t>(in.rows()) != dim())
    throw ConfigError("state dimension does not match the Hamiltonian");
  out.resize(in.rows(), in.cols());
  kernels::apply_parallel(*op_, in.data(), out.data(), static_cast<std::size_t>(in.cols()));
}

void HamiltonianHandle::apply_serial(const CMat& in, CMat& out) const {
  if (static_cast<std::size_t>(in.rows()) != dim())
    throw ConfigError("state dimension does not match the Hamiltonian");
  out.resize(in.rows(), in.cols());
  kernels::apply_serial(*op_, in.data(), out.data(), static_cast<std::size_t>(in.cols()));
}

CMat HamiltonianHandle::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dim());
  CMat out;
  apply(CMat::Identity(n, n), out);
  return out;
}

HamiltonianHandle build_hamiltonian(const RadicalSpec& radical, const Vec3& field_mT,
                                    std::size_t dimension_cap) {
  return HamiltonianHandle(radical, field_mT, dimension_cap);
}

}  // namespace rpsim
