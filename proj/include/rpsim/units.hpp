#pragma once

#include <numbers>

namespace rpsim::units {

// Internal units: time in ns, magnetic field in mT, angular frequency in rad/ns.

/// Electron gyromagnetic ratio g_e * mu_B / hbar with g_e = 2.0023, in rad ns^-1 mT^-1.
/// Hyperfine couplings quoted in mT are converted with the same factor.
inline constexpr double kGammaE = 0.17608;

/// Rate in s^-1 to ns^-1.
inline constexpr double per_second_to_per_ns(double k) { return k * 1e-9; }

/// CODATA 2018 values, SI units. Used only at the boundary where
/// energies are compared with k_B T.
namespace codata2018 {
inline constexpr double kHbar = 1.054571817e-34;          // J s
inline constexpr double kBoltzmann = 1.380649e-23;        // J / K
inline constexpr double kBohrMagneton = 9.2740100783e-24; // J / T
inline constexpr double kElectronG = 2.00231930436256;
}  // namespace codata2018

/// Electron gyromagnetic ratio from CODATA 2018, rad s^-1 T^-1.
inline constexpr double gamma_e_si() {
  return codata2018::kElectronG * codata2018::kBohrMagneton / codata2018::kHbar;
}

inline constexpr double kPi = std::numbers::pi;

}  // namespace rpsim::units
