#ifndef ETRAP_CONSTANTS_HPP
#define ETRAP_CONSTANTS_HPP

namespace etrap {
namespace constants {

// CODATA 2018. Fixed at compile time, never user-mutable.
inline constexpr double hbar     = 1.054571817e-34;   // J s
inline constexpr double h_planck = 6.62607015e-34;    // J s
inline constexpr double e_charge = 1.602176634e-19;   // C
inline constexpr double eps0     = 8.8541878128e-12;  // F/m
inline constexpr double k_B      = 1.380649e-23;      // J/K
inline constexpr double m_e      = 9.1093837015e-31;  // kg
inline constexpr double amu      = 1.66053906660e-27; // kg
inline constexpr double c_light  = 299792458.0;       // m/s

inline constexpr double pi    = 3.14159265358979323846;
inline constexpr double twopi = 6.28318530717958647692;

// hc in eV nm, handy for photoionization energetics.
inline constexpr double hc_ev_nm = h_planck * c_light / e_charge * 1e9;

// e^2 / (4 pi eps0), J m
inline constexpr double coulomb_k = e_charge * e_charge / (4.0 * pi * eps0);

// Be-9 ion, the default partner species for the two-species trap.
inline constexpr double m_be9 = 9.012 * amu;

} // namespace constants
} // namespace etrap

#endif
