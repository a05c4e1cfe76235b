#pragma once

namespace hotplate::units {

// Canonical internal units are SI: m, kg, s, K, W, V, A, ohm.
// Micrometre-denominated inputs are converted at parse/construction time.

inline constexpr double um = 1e-6;  // metres per micrometre

inline constexpr double from_um(double value_um) { return value_um * 1e-6; }
inline constexpr double to_um(double value_m) { return value_m * 1e6; }

// 1 mA/um^2 = 1e9 A/m^2
inline constexpr double ma_per_um2 = 1e9;

inline constexpr double ppm = 1e-6;

}  // namespace hotplate::units
