#include <cstring>

#include "rpsim/kernels.hpp"

namespace rpsim::kernels {
namespace {

inline void apply_column(const KroneckerOperator& k, const cplx* in, cplx* out) {
  const std::size_t m = k.nuclear_dim;
  std::fill(out, out + k.dim, cplx{0.0, 0.0});
  for (int eo = 0; eo < 2; ++eo) {
    for (int ei = 0; ei < 2; ++ei) {
      const cplx z = k.electron(eo, ei);
      if (z == cplx{}) continue;
      cplx* o = out + eo * m;
      const cplx* x = in + ei * m;
      for (std::size_t n = 0; n < m; ++n) o[n] += z * x[n];
    }
  }
  for (const auto& t : k.terms) {
    const std::size_t d = t.nuc_dim;
    const std::size_t s = t.stride;
    const std::size_t outer = m / (d * s);
    for (const auto& e : t.entries) {
      const std::size_t ep = e.row / d, np = e.row % d;
      const std::size_t eq = e.col / d, nq = e.col % d;
      const cplx v = e.value;
      for (std::size_t o = 0; o < outer; ++o) {
        cplx* dst = out + ep * m + (o * d + np) * s;
        const cplx* src = in + eq * m + (o * d + nq) * s;
        for (std::size_t r = 0; r < s; ++r) dst[r] += v * src[r];
      }
    }
  }
}

inline void rotate_column(const Mat2c& r, cplx* col, std::size_t dim) {
  const std::size_t m = dim / 2;
  cplx* up = col;
  cplx* dn = col + m;
  for (std::size_t n = 0; n < m; ++n) {
    const cplx u = up[n], d = dn[n];
    up[n] = r(0, 0) * u + r(0, 1) * d;
    dn[n] = r(1, 0) * u + r(1, 1) * d;
  }
}

}  // namespace

void apply_serial(const KroneckerOperator& k, const cplx* in, cplx* out, std::size_t ncols) {
  for (std::size_t c = 0; c < ncols; ++c) apply_column(k, in + c * k.dim, out + c * k.dim);
}

void apply_parallel(const KroneckerOperator& k, const cplx* in, cplx* out, std::size_t ncols) {
  const auto n = static_cast<long>(ncols);
#pragma omp parallel for schedule(static) if (ncols > 1 && ncols * k.dim > 4096)
  for (long c = 0; c < n; ++c) apply_column(k, in + c * k.dim, out + c * k.dim);
}

void electron_rotate_serial(const Mat2c& r, cplx* data, std::size_t dim, std::size_t ncols) {
  for (std::size_t c = 0; c < ncols; ++c) rotate_column(r, data + c * dim, dim);
}

void electron_rotate_parallel(const Mat2c& r, cplx* data, std::size_t dim, std::size_t ncols) {
  const auto n = static_cast<long>(ncols);
#pragma omp parallel for schedule(static) if (ncols * dim > 8192)
  for (long c = 0; c < n; ++c) rotate_column(r, data + c * dim, dim);
}

}  // namespace rpsim::kernels
