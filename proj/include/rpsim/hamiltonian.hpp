#pragma once

#include <memory>

#include "rpsim/kernels.hpp"
#include "rpsim/radical.hpp"
#include "rpsim/types.hpp"

namespace rpsim {

/// Matrix-free H = -gamma_e B.S + gamma_e sum_j S.lambda_j.I_j for one radical,
/// in rad/ns. Immutable after construction and safe to share across threads.
class HamiltonianHandle {
 public:
  HamiltonianHandle(RadicalSpec radical, const Vec3& field_mT,
                    std::size_t dimension_cap = kDefaultDimensionCap);

  std::size_t dim() const { return op_->dim; }
  std::size_t nuclear_dim() const { return op_->nuclear_dim; }
  const RadicalSpec& radical() const { return *radical_; }
  const Vec3& field() const { return field_; }

  /// Upper bound on the spectral radius: gamma_e (|B| + sum_j s_e s_j |lambda_j|_1),
  /// |.|_1 the entrywise 1-norm of the tensor.
  double spectral_radius_bound() const { return bound_; }

  /// out = H * in, column by column. `out` is resized.
  void apply(const CMat& in, CMat& out) const;
  /// Serial reference of apply().
  void apply_serial(const CMat& in, CMat& out) const;

  /// Dense matrix, materialized column by column. Intended for small systems,
  /// oracles and the eigen-decomposition based long-time integrator.
  CMat to_dense() const;

  const kernels::KroneckerOperator& kronecker() const { return *op_; }

 private:
  std::shared_ptr<const RadicalSpec> radical_;
  Vec3 field_;
  std::shared_ptr<const kernels::KroneckerOperator> op_;
  double bound_ = 0.0;
};

HamiltonianHandle build_hamiltonian(const RadicalSpec& radical, const Vec3& field_mT,
                                    std::size_t dimension_cap = kDefaultDimensionCap);

}  // namespace rpsim
