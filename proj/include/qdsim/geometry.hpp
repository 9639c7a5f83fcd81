#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "units.hpp"

namespace qd {

struct invalid_input : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Geometry of a linear array of double-dot qubits.
//
// Each qubit is a vertical pair of dots (upper dot alpha, lower dot beta).
// d_A: gate to upper dot, d_B: interdot barrier, d_C: lower dot to substrate,
// d_D: lateral dot-to-dot distance between adjacent qubits.
struct DeviceGeometry {
    double r0 = 2.5;
    double d_A = 8.0;
    double d_B = 1.5;
    double d_C = 2.5;
    double d_D = 12.0;
    double eps_ox = 4.0;
    double eps_si = 12.0;
    std::size_t n_qubits = 2;

    void validate() const {
        if (!(r0 > 0) || !(d_A > 0) || !(d_B > 0) || !(d_C > 0) || !(d_D > 0))
            throw invalid_input("geometry: all lengths must be positive");
        if (eps_ox < 1.0 || eps_si < 1.0)
            throw invalid_input("geometry: permittivities must be >= 1");
        if (n_qubits < 1)
            throw invalid_input("geometry: n_qubits must be >= 1");
    }
};

// Capacitance network of a qubit chain, all values in aF.
//
// Per qubit i: cA[i] gate..alpha, cB[i] alpha..beta (interdot),
// cC[i] beta..substrate, cH[i] alpha..gate(i-1), cI[i] alpha..gate(i+1).
// Per bond i (between qubits i and i+1): cD upper-dot..upper-dot,
// cG lower..lower, cE alpha_i..beta_{i+1}, cF beta_i..alpha_{i+1}.
// The network keeps the symmetries cD = cG and cE = cF.
struct CapacitanceSet {
    std::vector<double> cA, cB, cC, cH, cI; // size N
    std::vector<double> cD, cE;             // size N-1; cG == cD, cF == cE
    // grid mode only: per-bond caps, row-major; empty for chains
    std::vector<double> cDx, cDy;

    std::size_t n_qubits() const { return cA.size(); }
    std::size_t n_bonds() const { return cD.size(); }

    void validate() const {
        const std::size_t n = n_qubits();
        if (n == 0 || cB.size() != n || cC.size() != n || cH.size() != n ||
            cI.size() != n)
            throw invalid_input("capacitances: inconsistent per-qubit arrays");
        if (cD.size() + 1 != n || cE.size() + 1 != n)
            throw invalid_input("capacitances: bond arrays must have N-1 entries");
        auto nonneg = [](const std::vector<double>& v) {
            for (double x : v)
                if (!(x >= 0)) return false;
            return true;
        };
        if (!nonneg(cA) || !nonneg(cB) || !nonneg(cC) || !nonneg(cH) ||
            !nonneg(cI) || !nonneg(cD) || !nonneg(cE) || !nonneg(cDx) ||
            !nonneg(cDy))
            throw invalid_input("capacitances: negative value");
        if (cH[0] != 0.0)
            throw invalid_input("capacitances: cH[0] must vanish (no left gate)");
        if (cI[n - 1] != 0.0)
            throw invalid_input("capacitances: cI[N-1] must vanish (no right gate)");
    }
};

// Parallel-plate estimates for the network of a DeviceGeometry.
//
// cA, cC use the gate/substrate form 2 pi e_ox r0^2 / (d + (e_ox/e_si) r0);
// cB and the inter-qubit cD use the dot-facing-dot form with 2 (e_ox/e_si) r0.
// Cross-gate caps cH, cI use the cA form at the diagonal distance
// hypot(d_A, d_D). cE (diagonal inter-qubit) defaults to zero.
inline CapacitanceSet caps_from_geometry(const DeviceGeometry& g) {
    g.validate();
    const double pref = 2.0 * M_PI * g.eps_ox * units::eps0 * g.r0 * g.r0;
    const double rr = (g.eps_ox / g.eps_si) * g.r0;
    const double cA = pref / (g.d_A + rr);
    const double cC = pref / (g.d_C + rr);
    const double cB = pref / (g.d_B + 2.0 * rr);
    const double cD = pref / (g.d_D + 2.0 * rr);
    const double cX = pref / (std::hypot(g.d_A, g.d_D) + rr);

    const std::size_t n = g.n_qubits;
    CapacitanceSet c;
    c.cA.assign(n, cA);
    c.cB.assign(n, cB);
    c.cC.assign(n, cC);
    c.cH.assign(n, cX);
    c.cI.assign(n, cX);
    c.cH[0] = 0.0;
    c.cI[n - 1] = 0.0;
    if (n >= 2) {
        c.cD.assign(n - 1, cD);
        c.cE.assign(n - 1, 0.0);
    }
    c.validate();
    return c;
}

} // namespace qd
