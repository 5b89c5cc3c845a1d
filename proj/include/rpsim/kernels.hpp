#pragma once

// Low-level data-parallel kernels. Every kernel has a serial reference
// implementation; the OpenMP variants must agree with it bit for bit.

#include <cstddef>
#include <vector>

#include "rpsim/types.hpp"

namespace rpsim::kernels {

struct SparseEntry {
  int row;
  int col;
  cplx value;
};

/// Operator on the (electron, nucleus j) pair of tensor factors. Local
/// indices are e * nuc_dim + n_j.
struct ElectronNucleusTerm {
  std::size_t nuc_dim = 1;
  std::size_t stride = 1;  // product of multiplicities of later nuclei
  std::vector<SparseEntry> entries;
};

/// Sum of an electron-only 2x2 operator and electron-nucleus couplings on
/// C^2 (x) C^{d_1} (x) ... (x) C^{d_n}, electron index most significant.
struct KroneckerOperator {
  std::size_t dim = 2;
  std::size_t nuclear_dim = 1;
  Mat2c electron = Mat2c::Zero();
  std::vector<ElectronNucleusTerm> terms;
};

/// out = K * in for `ncols` contiguous columns of length K.dim.
void apply_serial(const KroneckerOperator& k, const cplx* in, cplx* out, std::size_t ncols);
void apply_parallel(const KroneckerOperator& k, const cplx* in, cplx* out, std::size_t ncols);

/// Left-multiply the electron factor of `ncols` columns by a 2x2 matrix, in place.
void electron_rotate_serial(const Mat2c& r, cplx* data, std::size_t dim, std::size_t ncols);
void electron_rotate_parallel(const Mat2c& r, cplx* data, std::size_t dim, std::size_t ncols);

/// Reduced electron blocks of a set of state columns. Columns come in pairs
/// (psi_up_n, psi_down_n) for n = 0..npairs-1, laid out as
/// [up_0..up_{P-1}, down_0..down_{P-1}]. For each pair, writes the 2x2x2x2
/// tensor R[a][b](c,c') = sum_k psi_a(c,k) conj(psi_b(c',k)) into
/// out[n * 16 + (a*2+b)*4 + c*2 + c'].
void reduce_pairs_serial(const cplx* cols, std::size_t dim, std::size_t npairs, cplx* out);
void reduce_pairs_parallel(const cplx* cols, std::size_t dim, std::size_t npairs, cplx* out);

}  // namespace rpsim::kernels
