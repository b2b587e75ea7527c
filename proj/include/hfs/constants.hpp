#pragma once

#include <numbers>

namespace hfs::constants {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// CODATA 2018
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double hbar = 1.054571817e-34;                 // J s

// Sodium D1 defaults (ultracold 23Na sample).
namespace sodium_d1 {
inline constexpr double gamma_mhz = 9.76;          // gamma / 2pi
inline constexpr double delta_g_mhz = 1771.62;     // ground hyperfine splitting / 2pi
inline constexpr double delta_e_mhz = 188.88;      // excited hyperfine splitting / 2pi
inline constexpr double number_density = 1.5e20;   // m^-3
inline constexpr double dipole_moment = 21.1165e-30; // C m
inline constexpr double carrier_hz = 5.08333e14;   // optical carrier omega0 / 2pi
} // namespace sodium_d1

inline constexpr double mhz_to_rad_per_s(double mhz) { return two_pi * 1e6 * mhz; }

} // namespace hfs::constants
