#pragma once

// CODATA 2018 values, SI units.
namespace vcma::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double mu0 = 1.25663706212e-6;          // N/A^2
inline constexpr double bohr_magneton = 9.2740100783e-24; // J/T
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double boltzmann = 1.380649e-23;        // J/K

} // namespace vcma::constants
