#pragma once

// Physical constants and unit conversions.
//
// The toolkit carries lengths in micrometres and magnetic fields in Gauss
// throughout the field arithmetic; SI enters only where atomic constants do
// (trap frequencies, well depths).  The helpers below are the single place
// where the two systems meet.

#include <cmath>
#include <numbers>
#include <string>

namespace maglat {

inline constexpr double kPi = std::numbers::pi;

namespace constants {

/// mu_0 [T m / A]
inline constexpr double mu0 = 4.0 * kPi * 1e-7;
/// Bohr magneton [J/T]
inline constexpr double bohr_magneton = 9.2740100783e-24;
/// Boltzmann constant [J/K]
inline constexpr double boltzmann = 1.380649e-23;

} // namespace constants

namespace units {

inline constexpr double gauss_to_tesla = 1e-4;
inline constexpr double tesla_to_gauss = 1e4;
inline constexpr double um_to_m = 1e-6;
inline constexpr double m_to_um = 1e6;
inline constexpr double kelvin_to_uK = 1e6;

/// Curvature of |B|: G/um^2 -> T/m^2.
inline constexpr double curvature_to_si = gauss_to_tesla / (um_to_m * um_to_m);

} // namespace units

/// A trappable atomic species in a single Zeeman sub-level.
struct AtomSpecies {
    std::string name;
    double lande_gF = 0.0;
    int mF = 0;
    double mass_kg = 0.0;

    double gF_mF() const { return lande_gF * static_cast<double>(mF); }
    /// Low-field seekers (gF*mF > 0) are the ones this lattice can hold.
    bool is_low_field_seeker() const { return gF_mF() > 0.0; }
};

/// 87Rb in |F=2, mF=2>, the usual workhorse state.
inline AtomSpecies rb87() {
    return AtomSpecies{"87Rb|F=2,mF=2>", 0.5, 2, 1.44316060e-25};
}

} // namespace maglat
