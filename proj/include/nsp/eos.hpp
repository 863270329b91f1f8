#pragma once

#include <cmath>

// Constitutive relations of the isothermal model with K = nu = lambda = 1.
namespace nsp::eos {

inline double pressure(double v) { return 1.0 / v; }
inline double modified_pressure(double v) { return 2.0 / v; }
inline double modified_pressure_prime(double v) { return -2.0 / (v * v); }

/// Internal energy of the neutral part.
inline double internal_energy(double v) { return -2.0 * std::log(v); }

/// Lagrangian sound speed of the modified pressure, sqrt(-p~'(v)).
inline double sound_speed(double v) { return std::sqrt(2.0) / v; }

}  // namespace nsp::eos
