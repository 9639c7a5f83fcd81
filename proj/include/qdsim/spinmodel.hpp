#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "operators.hpp"

namespace qd {

// Spin-chain parameters in meV. Chain mode uses j (size N-1); grid mode uses
// jx (row-major, (nx-1) per row) and jy (nx per row, ny-1 rows) with qubit
// (ix, iy) stored at index iy*nx + ix.
struct SpinChainParams {
    std::size_t n_qubits = 0;
    std::vector<double> t;
    std::vector<double> omega;
    std::vector<double> j;
    bool grid = false;
    std::size_t nx = 0, ny = 0;
    std::vector<double> jx, jy;

    void validate() const {
        if (n_qubits == 0) throw invalid_input("spin params: n_qubits == 0");
        if (t.size() != n_qubits || omega.size() != n_qubits)
            throw invalid_input("spin params: t/omega size mismatch");
        if (grid) {
            if (nx * ny != n_qubits)
                throw invalid_input("spin params: grid dims mismatch");
            if (jx.size() != (nx - 1) * ny || jy.size() != nx * (ny - 1))
                throw invalid_input("spin params: grid bond arrays mismatch");
        } else {
            if (j.size() + 1 != n_qubits)
                throw invalid_input("spin params: j must have N-1 entries");
        }
    }

    std::size_t grid_index(std::size_t ix, std::size_t iy) const {
        return iy * nx + ix;
    }
};

// Lab-frame chain Hamiltonian: sum_i [t_i sigma_x,i + Omega_i I_z,i]
// + sum_i J_i I_z,i I_z,i+1. meV.
inline cmat build_lab_h(const SpinChainParams& p) {
    p.validate();
    if (p.grid) throw invalid_input("build_lab_h: chain mode only");
    const std::size_t n = p.n_qubits;
    check_qubit_count(n);
    cmat h = cmat::Zero(dim_of(n), dim_of(n));
    for (std::size_t i = 0; i < n; ++i) {
        h += p.t[i] * op_on_qubit(pauli_x(), i, n);
        h += p.omega[i] * spin_z(i, n);
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        h += p.j[i] * spin_z(i, n) * spin_z(i + 1, n);
    return h;
}

// Interdot basis change U0 = (1/sqrt2)[[1,1],[1,-1]] applied to the selected
// qubits. An involution.
inline cmat u0_matrix(const std::vector<std::size_t>& qubits, std::size_t n) {
    check_qubit_count(n);
    cmat u0(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    u0 << s, s, s, -s;
    cmat u = identity(dim_of(n));
    for (std::size_t q : qubits) u = op_on_qubit(u0, q, n) * u;
    return u;
}

inline cmat u0_matrix(std::size_t n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return u0_matrix(all, n);
}

// Conjugation by U0 on the selected qubits; its own inverse.
inline cmat u0_transform(const cmat& op, const std::vector<std::size_t>& qubits,
                         std::size_t n) {
    const cmat u = u0_matrix(qubits, n);
    return u * op * u;
}

inline cmat u0_transform(const cmat& op, std::size_t n) {
    const cmat u = u0_matrix(n);
    return u * op * u;
}

namespace detail {

inline void add_single_qubit_onres(cmat& h, const SpinChainParams& p,
                                   const std::vector<double>& delta) {
    const std::size_t n = p.n_qubits;
    for (std::size_t i = 0; i < n; ++i) {
        h += 2.0 * p.t[i] * spin_z(i, n);
        h -= delta[i] * spin_x(i, n);
    }
}

} // namespace detail

// 2D-lattice on-resonance Hamiltonian: single-qubit terms as in the chain
// case, Ising I_x I_x couplings on horizontal (jx) and vertical (jy) bonds.
inline cmat build_grid_h(const SpinChainParams& p,
                         const std::vector<double>& delta) {
    p.validate();
    if (!p.grid) throw invalid_input("build_grid_h: params not in grid mode");
    const std::size_t n = p.n_qubits;
    check_qubit_count(n);
    if (delta.size() != n) throw invalid_input("build_grid_h: delta size");
    cmat h = cmat::Zero(dim_of(n), dim_of(n));
    detail::add_single_qubit_onres(h, p, delta);
    for (std::size_t iy = 0; iy < p.ny; ++iy)
        for (std::size_t ix = 0; ix + 1 < p.nx; ++ix) {
            const double jb = p.jx[iy * (p.nx - 1) + ix];
            h += jb * spin_x(p.grid_index(ix, iy), n) *
                 spin_x(p.grid_index(ix + 1, iy), n);
        }
    for (std::size_t iy = 0; iy + 1 < p.ny; ++iy)
        for (std::size_t ix = 0; ix < p.nx; ++ix) {
            const double jb = p.jy[iy * p.nx + ix];
            h += jb * spin_x(p.grid_index(ix, iy), n) *
                 spin_x(p.grid_index(ix, iy + 1), n);
        }
    return h;
}

// On-resonance Hamiltonian at one instant:
// sum_i [2 t_i I'_z,i - Delta_i I'_x,i] + sum_bonds J I'_x I'_x. meV.
inline cmat build_onres_h(const SpinChainParams& p,
                          const std::vector<double>& delta) {
    p.validate();
    if (p.grid) return build_grid_h(p, delta);
    const std::size_t n = p.n_qubits;
    check_qubit_count(n);
    if (delta.size() != n) throw invalid_input("build_onres_h: delta size");
    cmat h = cmat::Zero(dim_of(n), dim_of(n));
    detail::add_single_qubit_onres(h, p, delta);
    for (std::size_t i = 0; i + 1 < n; ++i)
        h += p.j[i] * spin_x(i, n) * spin_x(i + 1, n);
    return h;
}

// One qubit's rotating-frame drive: amplitude Delta_0 (meV) and phase (rad).
struct RwaDrive {
    double amp = 0;
    double phase = 0;
};

// Rotating-wave Hamiltonian:
// -sum_i (Delta_0i/2)[I'_x cos d_i + I'_y sin d_i]
// + sum_bonds (J/2)[I'_x I'_x + I'_y I'_y]. meV.
inline cmat build_rwa_h(const SpinChainParams& p,
                        const std::vector<RwaDrive>& drives) {
    p.validate();
    const std::size_t n = p.n_qubits;
    check_qubit_count(n);
    if (drives.size() != n) throw invalid_input("build_rwa_h: drive size");
    cmat h = cmat::Zero(dim_of(n), dim_of(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (drives[i].amp == 0.0) continue;
        h -= 0.5 * drives[i].amp *
             (std::cos(drives[i].phase) * spin_x(i, n) +
              std::sin(drives[i].phase) * spin_y(i, n));
    }
    auto couple = [&](std::size_t a, std::size_t b, double jb) {
        h += 0.5 * jb *
             (spin_x(a, n) * spin_x(b, n) + spin_y(a, n) * spin_y(b, n));
    };
    if (p.grid) {
        for (std::size_t iy = 0; iy < p.ny; ++iy)
            for (std::size_t ix = 0; ix + 1 < p.nx; ++ix)
                couple(p.grid_index(ix, iy), p.grid_index(ix + 1, iy),
                       p.jx[iy * (p.nx - 1) + ix]);
        for (std::size_t iy = 0; iy + 1 < p.ny; ++iy)
            for (std::size_t ix = 0; ix < p.nx; ++ix)
                couple(p.grid_index(ix, iy), p.grid_index(ix, iy + 1),
                       p.jy[iy * p.nx + ix]);
    } else {
        for (std::size_t i = 0; i + 1 < n; ++i) couple(i, i + 1, p.j[i]);
    }
    return h;
}

} // namespace qd
