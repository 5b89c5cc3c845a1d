#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rpsim/types.hpp"

namespace rpsim {

/// Default cap on the electron-plus-nuclei Hilbert-space dimension of one radical.
inline constexpr std::size_t kDefaultDimensionCap = std::size_t{1} << 12;

struct Nucleus {
  std::string label;
  int multiplicity = 2;     // 2 for spin-1/2, 3 for spin-1
  Mat3 hyperfine = Mat3::Zero();  // mT, row-major (xx, xy, xz; yx, ...)
  std::string provenance;
  bool asymmetric = false;  // explicitly allowed to be non-symmetric
};

/// One electron and the nuclear spins it couples to.
struct RadicalSpec {
  std::string name;
  std::vector<Nucleus> nuclei;

  /// Product of nuclear multiplicities (1 for a bare electron).
  std::size_t nuclear_dim() const;
  /// 2 * nuclear_dim().
  std::size_t hilbert_dim() const { return 2 * nuclear_dim(); }
  /// True iff every tensor equals lambda * identity within 1e-12.
  bool isotropic() const;
};

bool is_isotropic_tensor(const Mat3& t, double tol = 1e-12);
Mat3 isotropic_tensor(double lambda_mT);

/// Throws ConfigError on non-finite entries or a dimension above the cap.
void validate(const RadicalSpec& spec, std::size_t dimension_cap = kDefaultDimensionCap);

/// A sub-problem of a radical obtained by coupling nuclei with identical
/// tensors and multiplicity into total-spin multiplets. The channel of the
/// full radical under a maximally mixed bath is sum_b weight_b * channel_b.
struct BathBlock {
  RadicalSpec effective;
  double weight = 1.0;          // degeneracy * block nuclear dim / total nuclear dim
  std::size_t degeneracy = 1;
};

/// Blocks for the equivalent-nuclei decomposition. Weights sum to 1.
std::vector<BathBlock> equivalent_nuclei_blocks(const RadicalSpec& spec);

/// The trivial decomposition: the radical itself with weight 1.
std::vector<BathBlock> single_block(const RadicalSpec& spec);

/// Multiplet content of n spins of the given multiplicity:
/// (total multiplicity 2J+1, number of copies), largest J first.
std::vector<std::pair<int, std::size_t>> multiplet_content(int n, int multiplicity);

}  // namespace rpsim
