#include "rpsim/chebyshev.hpp"

#include <cmath>
#include <sstream>

#include "rpsim/errors.hpp"

namespace rpsim {

CMat chebyshev_propagate(const Applicator& apply, double spectral_bound, const CMat& psi,
                         double t, double tol, ChebyshevStats* stats) {
  if (!(tol > 0.0 && tol <= 1e-3))
    throw ConfigError("Chebyshev tolerance must lie in (0, 1e-3]");
  if (stats) stats->terms = 0;
  const double r = spectral_bound;
  if (t == 0.0 || r == 0.0) return psi;

  const double x = r * std::abs(t);
  // (-i)^k for forward, (+i)^k for backward evolution
  const cplx step = t > 0 ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
  const double inv_r = 1.0 / r;

  CMat prev = psi;
  CMat curr;
  CMat next;
  apply(prev, curr);
  curr *= inv_r;

  CMat result = std::cyl_bessel_j(0.0, x) * prev;
  cplx phase = step;
  result += (2.0 * std::cyl_bessel_j(1.0, x)) * phase * curr;

  const int max_order = static_cast<int>(x) + 200 + static_cast<int>(4.0 * std::sqrt(x + 1.0));
  int small_run = 0;
  int k = 1;
  while (true) {
    ++k;
    if (k > max_order) {
      std::ostringstream os;
      os << "Chebyshev series did not converge within " << max_order << " terms (R|t| = " << x
         << ")";
      throw ConvergenceError(os.str());
    }
    apply(curr, next);
    next *= 2.0 * inv_r;
    next -= prev;
    phase *= step;
    const double jk = std::cyl_bessel_j(static_cast<double>(k), x);
    result += (2.0 * jk) * phase * next;
    std::swap(prev, curr);
    std::swap(curr, next);
    if (k > x && std::abs(jk) < 0.1 * tol) {
      if (++small_run >= 3) break;
    } else {
      small_run = 0;
    }
  }
  if (stats) stats->terms = k + 1;
  return result;
}

CMat chebyshev_propagate(const HamiltonianHandle& h, const CMat& psi, double t, double tol,
                         ChebyshevStats* stats) {
  if (static_cast<std::size_t>(psi.rows()) != h.dim())
    throw ConfigError("state dimension does not match the Hamiltonian");
  for (Eigen::Index c = 0; c < psi.cols(); ++c) {
    const double n = psi.col(c).norm();
    if (std::abs(n - 1.0) > 1e-10) {
      std::ostringstream os;
      os << "input state column " << c << " has norm " << n << "; expected 1";
      throw ConfigError(os.str());
    }
  }
  return chebyshev_propagate([&h](const CMat& in, CMat& out) { h.apply(in, out); },
                             h.spectral_radius_bound(), psi, t, tol, stats);
}

CMat chebyshev_unitary(const HamiltonianHandle& h, double t, double tol) {
  const auto n = static_cast<Eigen::Index>(h.dim());
  return chebyshev_propagate(h, CMat::Identity(n, n), t, tol);
}

}  // namespace rpsim
