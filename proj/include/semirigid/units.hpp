#pragma once

// Unit conversions used across the library. Everything internal is SI
// (N, m, Pa, N*m/rad).
namespace semirigid::units {

inline constexpr double inch = 0.0254;              // m
inline constexpr double kip = 4448.2216152605;      // N
inline constexpr double ksi = kip / (inch * inch);  // Pa
inline constexpr double kip_inch = kip * inch;      // N*m
inline constexpr double n_cm = 0.01;                // N*m
inline constexpr double standard_gravity = 9.80665; // m/s^2

/// Steel unit weight, N/m^3.
inline constexpr double steel_unit_weight = 77008.0;
/// Steel elastic modulus used for the benchmark frames, Pa (2.1e6 kgf/cm^2).
inline constexpr double steel_modulus = 2.059e11;

/// Weight in N expressed as metric tonnes (force).
inline constexpr double to_tonnes(double newtons) { return newtons / standard_gravity / 1000.0; }

} // namespace semirigid::units
