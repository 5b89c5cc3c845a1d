#pragma once

#include <random>

#include "rpsim/radical.hpp"
#include "rpsim/types.hpp"

namespace testing {

inline rpsim::CVec random_state(std::mt19937_64& g, Eigen::Index n) {
  std::normal_distribution<double> d;
  rpsim::CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = {d(g), d(g)};
  return v / v.norm();
}

inline rpsim::Nucleus iso(double lambda, int mult = 2, std::string label = "H") {
  rpsim::Nucleus n;
  n.label = std::move(label);
  n.multiplicity = mult;
  n.hyperfine = rpsim::isotropic_tensor(lambda);
  return n;
}

inline rpsim::Nucleus aniso(const rpsim::Mat3& a, int mult = 2) {
  rpsim::Nucleus n;
  n.label = "X";
  n.multiplicity = mult;
  n.hyperfine = a;
  return n;
}

inline rpsim::RadicalSpec radical(std::vector<rpsim::Nucleus> nuclei, std::string name = "R") {
  rpsim::RadicalSpec r;
  r.name = std::move(name);
  r.nuclei = std::move(nuclei);
  return r;
}

inline rpsim::Mat3 random_symmetric(std::mt19937_64& g, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  rpsim::Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) a(i, j) = a(j, i) = u(g);
  return a;
}

inline double fidelity(const rpsim::CVec& a, const rpsim::CVec& b) {
  return std::abs(a.dot(b));
}

}  // namespace testing
