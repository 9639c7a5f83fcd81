#pragma once

// Unit system: lengths in nm, capacitance in aF, energy in meV, time in ps,
// charge in units of e, voltage in V.

namespace qd {

namespace units {

// vacuum permittivity, aF/nm
inline constexpr double eps0 = 8.8541878128e-3;

// e^2/aF expressed in meV; converts 1/C [1/aF] charging curvatures to meV
inline constexpr double Ke = 160.2176634;

// hbar in meV*ps
inline constexpr double hbar = 0.6582119569;

// Boltzmann constant, meV/K
inline constexpr double kB = 0.0861733;

// e/aF in volts: potential of a single electron on 1 aF
inline constexpr double e_over_aF = 0.1602176634;

// von Klitzing resistance, ohm
inline constexpr double RK = 25812.807;

// (R[ohm] * C[aF])^-1 in THz
inline constexpr double inv_rc_thz(double r_ohm, double c_aF) {
    return 1.0e6 / (r_ohm * c_aF);
}

// temperature in K for an energy in meV
inline constexpr double mev_to_kelvin(double e) { return e / kB; }
inline constexpr double kelvin_to_mev(double t) { return t * kB; }

} // namespace units

} // namespace qd
