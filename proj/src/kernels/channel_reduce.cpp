#include "rpsim/kernels.hpp"

namespace rpsim::kernels {
namespace {

inline void reduce_one(const cplx* cols, std::size_t dim, std::size_t npairs, std::size_t n,
                       cplx* out) {
  const std::size_t m = dim / 2;
  const cplx* psi[2] = {cols + n * dim, cols + (npairs + n) * dim};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        for (int cp = 0; cp < 2; ++cp) {
          const cplx* x = psi[a] + c * m;
          const cplx* y = psi[b] + cp * m;
          cplx acc{};
          for (std::size_t k = 0; k < m; ++k) acc += x[k] * std::conj(y[k]);
          out[n * 16 + (a * 2 + b) * 4 + c * 2 + cp] = acc;
        }
      }
    }
  }
}

}  // namespace

void reduce_pairs_serial(const cplx* cols, std::size_t dim, std::size_t npairs, cplx* out) {
  for (std::size_t n = 0; n < npairs; ++n) reduce_one(cols, dim, npairs, n, out);
}

void reduce_pairs_parallel(const cplx* cols, std::size_t dim, std::size_t npairs, cplx* out) {
  const auto np = static_cast<long>(npairs);
#pragma omp parallel for schedule(static) if (npairs * dim > 8192)
  for (long n = 0; n < np; ++n) reduce_one(cols, dim, npairs, static_cast<std::size_t>(n), out);
}

}  // namespace rpsim::kernels
