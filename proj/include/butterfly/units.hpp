#pragma once

#include <numbers>

namespace bfm {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angular frequency in rad/ns for a plain frequency given in MHz.
/// All Hamiltonian coefficients are stored in rad/ns; times are in ns.
inline constexpr double omega_from_mhz(double f_mhz) { return kTwoPi * f_mhz * 1e-3; }

}  // namespace bfm
