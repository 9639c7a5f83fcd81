#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>

#include "geometry.hpp"
#include "units.hpp"

namespace qd {

struct degenerate_network : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Dims { chain, grid };

// Auxiliary capacitances of one qubit, all in aF (D in aF^2).
//
// ca, cb, cc, cd, ce, D are the reduction constants (grid mode drops the
// inter-qubit and cross-gate terms); ca2, cb2, cc2, D2 always hold the grid
// variants. The node fields (s_alpha, s_beta, c_int, bond caps) carry the
// per-dot capacitance sums used by the exact pair reduction; they determine
// and are determined by the reduction constants when cross caps vanish.
// cA, cC, cH, cI are copied through for the gate-coupling formulas.
struct AuxCaps {
    double ca = 0, cb = 0, cc = 0, cd = 0, ce = 0, D = 0;
    double ca2 = 0, cb2 = 0, cc2 = 0, D2 = 0;
    double cA = 0, cC = 0, cH = 0, cI = 0;
    // node data
    double s_alpha = 0;  // total capacitance on the upper dot
    double s_beta = 0;   // total capacitance on the lower dot
    double c_int = 0;    // interdot cB
    double bond_cd_r = 0, bond_ce_r = 0; // bond to the right neighbor
    double bond_cd_l = 0, bond_ce_l = 0; // bond to the left neighbor
};

// Reduction constants for qubit i. Boundary qubits take zero for absent
// neighbor terms. The textbook cc adds the cross-gate caps with a plus sign;
// the node sums keep them on the upper dot per the charge constraints.
inline AuxCaps derive_aux(const CapacitanceSet& c, std::size_t i,
                          Dims dims = Dims::chain) {
    c.validate();
    const std::size_t n = c.n_qubits();
    if (i >= n) throw invalid_input("derive_aux: qubit index out of range");

    const double cdr = (i + 1 < n) ? c.cD[i] : 0.0;
    const double cer = (i + 1 < n) ? c.cE[i] : 0.0;
    const double cdl = (i > 0) ? c.cD[i - 1] : 0.0;
    const double cel = (i > 0) ? c.cE[i - 1] : 0.0;
    const double bonds = cdr + cer + cdl + cel;

    AuxCaps a;
    a.cA = c.cA[i];
    a.cC = c.cC[i];
    a.cH = c.cH[i];
    a.cI = c.cI[i];

    a.cb2 = c.cA[i] + c.cC[i];
    a.ca2 = a.cb2 + 4.0 * c.cB[i];
    a.cc2 = c.cC[i] - c.cA[i];
    a.D2 = a.ca2 * a.cb2 - a.cc2 * a.cc2;
    if (!(a.D2 > 0)) throw degenerate_network("derive_aux: grid D <= 0");

    if (dims == Dims::grid) {
        a.ca = a.ca2;
        a.cb = a.cb2;
        a.cc = a.cc2;
        a.cd = 0.0;
        a.ce = 0.0;
        a.D = a.D2;
    } else {
        a.cb = c.cA[i] + c.cC[i] + 2.0 * bonds + c.cH[i] + c.cI[i];
        a.ca = a.cb + 4.0 * c.cB[i];
        a.cc = c.cC[i] - c.cA[i] + c.cH[i] + c.cI[i];
        a.cd = cdr + cer;
        a.ce = cdr - cer;
        a.D = a.ca * a.cb - a.cc * a.cc;
        if (!(a.D > 0)) throw degenerate_network("derive_aux: D <= 0");
    }

    a.s_alpha = c.cA[i] + c.cB[i] + c.cH[i] + c.cI[i] + bonds;
    a.s_beta = c.cB[i] + c.cC[i] + bonds;
    a.c_int = c.cB[i];
    a.bond_cd_r = cdr;
    a.bond_ce_r = cer;
    a.bond_cd_l = cdl;
    a.bond_ce_l = cel;
    return a;
}

// E_C = cb/(2D) scaled to meV.
inline double charging_energy(const AuxCaps& a) {
    if (!(a.D > 0)) throw degenerate_network("charging_energy: D <= 0");
    return a.cb / (2.0 * a.D) * units::Ke;
}

// 2x2 node-capacitance block of one qubit.
inline Eigen::Matrix2d node_block(const AuxCaps& a) {
    Eigen::Matrix2d w;
    w << a.s_alpha, -a.c_int, -a.c_int, a.s_beta;
    return w;
}

namespace detail {

// Pair coupling coefficient of n_i n_j in 1/aF, from the exact 4x4
// node-matrix inverse of the two-qubit block. uses the right bond of a.
inline double pair_nn_coeff(const AuxCaps& a, const AuxCaps& b) {
    Eigen::Matrix4d w = Eigen::Matrix4d::Zero();
    w.topLeftCorner<2, 2>() = node_block(a);
    w.bottomRightCorner<2, 2>() = node_block(b);
    Eigen::Matrix2d v;
    v << -a.bond_cd_r, -a.bond_ce_r, -a.bond_ce_r, -a.bond_cd_r;
    w.topRightCorner<2, 2>() = v;
    w.bottomLeftCorner<2, 2>() = v.transpose();

    Eigen::FullPivLU<Eigen::Matrix4d> lu(w);
    if (!lu.isInvertible())
        throw degenerate_network("pair coupling: singular node matrix");
    const Eigen::Matrix4d m = lu.inverse();
    return 0.25 * (m(0, 2) - m(0, 3) - m(1, 2) + m(1, 3));
}

} // namespace detail

// Fixed empirically against the charging oracle: the four-point sum
// E(++) + E(--) - E(+-) - E(-+) equals this factor times coupling_j in the
// small-coupling limit. It reflects n_i = 2 I_zi plus the quarter
// normalization of coupling_j.
inline constexpr double spin_convention_factor = 16.0;

// Nearest-neighbor coupling J in meV (the reported J normalization:
// one quarter of the n_i n_j coefficient). Evaluated exactly from the
// two-qubit node blocks; identical to the truncated textbook expression
// up to relative O(cd^2/D).
inline double coupling_j(const AuxCaps& a, const AuxCaps& b) {
    return 0.25 * detail::pair_nn_coeff(a, b) * units::Ke;
}

// Truncated closed form [cb_i cb_j ce + cc_i cc_j cd] / (2 D_i D_j),
// kept for truncation-error reporting against coupling_j.
inline double coupling_j_truncated(const AuxCaps& a, const AuxCaps& b) {
    const double x = a.cb * b.cb * a.ce + a.cc * b.cc * a.cd;
    return x / (2.0 * a.D * b.D) * units::Ke;
}

// 2D lattice bond coupling J = 2 (cb_i cb_n + cc_i cc_n) C_bond / (D_i D_n),
// using the 2D reduction constants.
inline double coupling_2d(const AuxCaps& a, const AuxCaps& b, double bond_cap) {
    if (bond_cap < 0) throw invalid_input("coupling_2d: negative bond cap");
    const double x = (a.cb2 * b.cb2 + a.cc2 * b.cc2) * bond_cap;
    return 2.0 * x / (a.D2 * b.D2) * units::Ke;
}

// Exact per-qubit charging energies of an adjacent pair, meV. Returns the
// energy whose curvature in n matches the constrained minimum, i.e. the
// neighbor-dressed analogue of charging_energy.
inline std::pair<double, double> pair_charging_energy(const AuxCaps& a,
                                                      const AuxCaps& b) {
    Eigen::Matrix2d w1 = node_block(a);
    Eigen::Matrix2d w2 = node_block(b);
    Eigen::Matrix2d v;
    v << -a.bond_cd_r, -a.bond_ce_r, -a.bond_ce_r, -a.bond_cd_r;
    const Eigen::Matrix2d s1 = w1 - v * w2.inverse() * v.transpose();
    const Eigen::Matrix2d s2 = w2 - v.transpose() * w1.inverse() * v;
    Eigen::Vector2d u(1.0, -1.0);
    const double ec1 = 0.125 * u.dot(s1.inverse() * u) * units::Ke;
    const double ec2 = 0.125 * u.dot(s2.inverse() * u) * units::Ke;
    return {ec1, ec2};
}

// Full node-capacitance matrix of a chain (2N x 2N, node order
// alpha_0, beta_0, alpha_1, beta_1, ...).
inline Eigen::MatrixXd chain_node_matrix(const CapacitanceSet& c) {
    c.validate();
    const std::size_t n = c.n_qubits();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const AuxCaps a = derive_aux(c, i);
        w.block<2, 2>(2 * i, 2 * i) = node_block(a);
        if (i + 1 < n) {
            Eigen::Matrix2d v;
            v << -c.cD[i], -c.cE[i], -c.cE[i], -c.cD[i];
            w.block<2, 2>(2 * i, 2 * (i + 1)) = v;
            w.block<2, 2>(2 * (i + 1), 2 * i) = v.transpose();
        }
    }
    return w;
}

// Exact quadratic reduction of a chain: curvature d2E/dn_i dn_j of the
// constrained charging energy, in meV, from the node-matrix inverse.
// Diagonal entries equal 2 E_C,i (neighbor-dressed); off-diagonals are the
// n_i n_j coefficients (4x the coupling_j normalization for neighbors).
inline Eigen::MatrixXd chain_curvature(const CapacitanceSet& c) {
    const std::size_t n = c.n_qubits();
    const Eigen::MatrixXd w = chain_node_matrix(c);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(w);
    if (!lu.isInvertible())
        throw degenerate_network("chain_curvature: singular node matrix");
    const Eigen::MatrixXd m = lu.inverse();
    Eigen::MatrixXd k(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            k(i, j) = 0.25 * (m(2 * i, 2 * j) - m(2 * i, 2 * j + 1) -
                              m(2 * i + 1, 2 * j) + m(2 * i + 1, 2 * j + 1)) *
                      units::Ke;
    return k;
}

} // namespace qd
