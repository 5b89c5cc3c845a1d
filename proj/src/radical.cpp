#include "rpsim/radical.hpp"

#include <cmath>
#include <sstream>

#include "rpsim/errors.hpp"

namespace rpsim {

std::size_t RadicalSpec::nuclear_dim() const {
  std::size_t d = 1;
  for (const auto& n : nuclei) d *= static_cast<std::size_t>(n.multiplicity);
  return d;
}

bool is_isotropic_tensor(const Mat3& t, double tol) {
  const double lambda = t(0, 0);
  return (t - lambda * Mat3::Identity()).cwiseAbs().maxCoeff() <= tol;
}

Mat3 isotropic_tensor(double lambda_mT) { return lambda_mT * Mat3::Identity(); }

bool RadicalSpec::isotropic() const {
  for (const auto& n : nuclei)
    if (!is_isotropic_tensor(n.hyperfine)) return false;
  return true;
}

void validate(const RadicalSpec& spec, std::size_t dimension_cap) {
  std::size_t dim = 2;
  for (std::size_t j = 0; j < spec.nuclei.size(); ++j) {
    const auto& n = spec.nuclei[j];
    if (n.multiplicity < 2) {
      std::ostringstream os;
      os << "radical '" << spec.name << "' nucleus " << j << " has multiplicity "
         << n.multiplicity << "; spinless nuclei must be omitted";
      throw ConfigError(os.str());
    }
    if (!n.hyperfine.allFinite()) {
      std::ostringstream os;
      os << "radical '" << spec.name << "' nucleus " << j << " ('" << n.label
         << "') has a non-finite hyperfine tensor entry";
      throw ConfigError(os.str());
    }
    dim *= static_cast<std::size_t>(n.multiplicity);
    if (dim > dimension_cap) {
      // keep multiplying for the message, saturating on overflow
      std::size_t full = 2;
      for (const auto& m : spec.nuclei) {
        if (full > (std::size_t{1} << 60)) break;
        full *= static_cast<std::size_t>(m.multiplicity);
      }
      std::ostringstream os;
      os << "radical '" << spec.name << "' requires Hilbert-space dimension " << full
         << " but the configured cap is " << dimension_cap
         << "; truncate the bath or raise the cap";
      throw ConfigError(os.str());
    }
  }
}

std::vector<std::pair<int, std::size_t>> multiplet_content(int n, int multiplicity) {
  // Count states by total M via the coefficients of (1 + x + ... + x^{d-1})^n,
  // then degeneracy(J) = count(M = J) - count(M = J + 1).
  const int d = multiplicity;
  std::vector<std::size_t> c{1};
  for (int i = 0; i < n; ++i) {
    std::vector<std::size_t> next(c.size() + d - 1, 0);
    for (std::size_t k = 0; k < c.size(); ++k)
      for (int m = 0; m < d; ++m) next[k + m] += c[k];
    c = std::move(next);
  }
  const int twice_mmax = n * (d - 1);
  std::vector<std::pair<int, std::size_t>> out;
  for (int k = 0; 2 * k <= twice_mmax; ++k) {
    const std::size_t deg = c[k] - (k > 0 ? c[k - 1] : 0);
    if (deg > 0) out.emplace_back(twice_mmax - 2 * k + 1, deg);
  }
  return out;
}

std::vector<BathBlock> single_block(const RadicalSpec& spec) {
  return {BathBlock{spec, 1.0, 1}};
}

std::vector<BathBlock> equivalent_nuclei_blocks(const RadicalSpec& spec) {
  struct Group {
    const Nucleus* representative;
    int count;
  };
  std::vector<Group> groups;
  for (const auto& n : spec.nuclei) {
    bool placed = false;
    for (auto& g : groups) {
      if (g.representative->multiplicity == n.multiplicity &&
          (g.representative->hyperfine - n.hyperfine).cwiseAbs().maxCoeff() <= 1e-12) {
        ++g.count;
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({&n, 1});
  }

  std::vector<BathBlock> blocks;
  blocks.push_back(BathBlock{RadicalSpec{spec.name, {}}, 1.0, 1});
  for (const auto& g : groups) {
    const auto content = multiplet_content(g.count, g.representative->multiplicity);
    std::vector<BathBlock> next;
    for (const auto& b : blocks) {
      for (const auto& [mult, deg] : content) {
        BathBlock nb = b;
        nb.degeneracy *= deg;
        if (mult > 1) {
          Nucleus eff = *g.representative;
          eff.multiplicity = mult;
          if (g.count > 1) eff.label += "x" + std::to_string(g.count);
          nb.effective.nuclei.push_back(eff);
        }
        next.push_back(std::move(nb));
      }
    }
    blocks = std::move(next);
  }
  const double total = static_cast<double>(spec.nuclear_dim());
  for (auto& b : blocks)
    b.weight = static_cast<double>(b.degeneracy) *
               static_cast<double>(b.effective.nuclear_dim()) / total;
  return blocks;
}

}  // namespace rpsim
