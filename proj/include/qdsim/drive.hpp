#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "auxcaps.hpp"
#include "units.hpp"

namespace qd {

struct ill_conditioned_compensation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
// energy of charge e across 1 V, in meV
inline constexpr double mev_per_eV = 1000.0;
} // namespace detail

// Gate charge Q_V = cA Vg_i + cH Vg_{i-1} + cI Vg_{i+1} in units of e.
// Boundary qubits have cH or cI = 0, so the absent neighbor voltage is inert.
inline double qv_from_gates(const AuxCaps& a, double vg_prev, double vg_self,
                            double vg_next) {
    return (a.cA * vg_self + a.cH * vg_prev + a.cI * vg_next) /
           units::e_over_aF;
}

// Detuning Omega = 4 cC / D (Q_V - Q_V^res), meV. Q_V^res is a calibration
// input in units of e absorbing the dot energy offsets.
inline double detuning_omega(const AuxCaps& a, double vg_prev, double vg_self,
                             double vg_next, double q_res_e) {
    const double qv = qv_from_gates(a, vg_prev, vg_self, vg_next);
    return 4.0 * a.cC / a.D * (qv - q_res_e) * units::Ke;
}

// Drive amplitudes Delta_i = 4 cA cC / D (v_i + [cH v_{i-1} + cI v_{i+1}]/cA)
// for one instant of the per-qubit gate offsets v (V). meV.
inline std::vector<double> drive_delta(const std::vector<AuxCaps>& aux,
                                       const std::vector<double>& v) {
    const std::size_t n = aux.size();
    if (v.size() != n)
        throw invalid_input("drive_delta: offset vector size mismatch");
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double vp = (i > 0) ? v[i - 1] : 0.0;
        const double vn = (i + 1 < n) ? v[i + 1] : 0.0;
        const double q = aux[i].cA * v[i] + aux[i].cH * vp + aux[i].cI * vn;
        delta[i] = 4.0 * aux[i].cC / aux[i].D * q * detail::mev_per_eV;
    }
    return delta;
}

// Gate offsets realizing the requested Delta_i despite cross-talk: solves the
// tridiagonal system cA_i v_i + cH_i v_{i-1} + cI_i v_{i+1} = rhs_i by the
// Thomas algorithm. Requires strict diagonal dominance cA > cH + cI per row.
inline std::vector<double> crosstalk_compensate(
    const std::vector<AuxCaps>& aux, const std::vector<double>& target) {
    const std::size_t n = aux.size();
    if (target.size() != n)
        throw invalid_input("crosstalk_compensate: target size mismatch");
    if (n == 0) return {};
    for (const AuxCaps& a : aux)
        if (!(a.cA > a.cH + a.cI))
            throw ill_conditioned_compensation(
                "crosstalk_compensate: cA <= cH + cI, system not diagonally "
                "dominant");

    std::vector<double> diag(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = aux[i].cA;
        rhs[i] = target[i] * aux[i].D /
                 (4.0 * aux[i].cC * detail::mev_per_eV);
    }
    // forward sweep: lower coefficient of row i is cH_i, upper is cI_i
    for (std::size_t i = 1; i < n; ++i) {
        const double w = aux[i].cH / diag[i - 1];
        diag[i] -= w * aux[i - 1].cI;
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> v(n);
    v[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        v[i] = (rhs[i] - aux[i].cI * v[i + 1]) / diag[i];
    return v;
}

} // namespace qd
