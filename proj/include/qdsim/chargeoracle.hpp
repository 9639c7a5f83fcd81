#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

#include "auxcaps.hpp"
#include "geometry.hpp"
#include "units.hpp"

namespace qd {

// Excess-charge configuration. n_i = N_alpha,i - N_beta,i is the relative
// excess charge, N_i = N_alpha,i + N_beta,i the total (1 in the physical
// computational states). The oracle itself accepts continuous values so
// curvatures can be extracted by finite differences of an exact quadratic.
struct ChargeConfig {
    std::vector<double> n;
    std::vector<double> N; // empty means all 1

    void validate_physical() const {
        for (double x : n)
            if (x != 1.0 && x != -1.0)
                throw invalid_input("charge config: n_i must be +1 or -1");
        for (double x : N)
            if (x != 1.0)
                throw invalid_input("charge config: N_i must be 1");
    }
};

// Brute-force charging energy: minimizes the junction-charge quadratic
//
//   sum_i [qA^2/2cA + qB^2/2cB + qC^2/2cC - qA Vg_i]
// + sum_bonds [qD^2/2cD + qE^2/2cE + qF^2/2cF + qG^2/2cG]
// + sum_i [qH^2/2cH - qH Vg_{i-1}] + sum_i [qI^2/2cI - qI Vg_{i+1}]
//
// over all continuous junction charges subject to the two node constraints
// per qubit, by solving the KKT system. Charges across a zero capacitance
// are pinned to zero (the junction is absent). Result in meV; charges in e,
// voltages in V. Intended as a ground-truth oracle for small networks,
// so the qubit count is capped at 4.
inline double charging_oracle(const CapacitanceSet& c,
                              const std::vector<double>& gates,
                              const ChargeConfig& cfg) {
    c.validate();
    const std::size_t n = c.n_qubits();
    if (n > 4) throw invalid_input("charging_oracle: more than 4 qubits");
    if (gates.size() != n)
        throw invalid_input("charging_oracle: gate vector size mismatch");
    if (cfg.n.size() != n)
        throw invalid_input("charging_oracle: charge config size mismatch");
    if (!cfg.N.empty() && cfg.N.size() != n)
        throw invalid_input("charging_oracle: N vector size mismatch");

    // variable registry: only junctions with positive capacitance carry charge
    std::vector<double> cap;     // capacitance per variable
    std::vector<double> vwork;   // gate voltage doing work on the variable, V
    auto add_var = [&](double capacitance, double v) -> int {
        if (capacitance <= 0.0) return -1;
        cap.push_back(capacitance);
        vwork.push_back(v);
        return static_cast<int>(cap.size()) - 1;
    };

    std::vector<int> qA(n), qB(n), qC(n), qH(n, -1), qI(n, -1);
    const std::size_t nb = c.n_bonds();
    std::vector<int> qD(nb, -1), qE(nb, -1), qF(nb, -1), qG(nb, -1);
    for (std::size_t i = 0; i < n; ++i) {
        qA[i] = add_var(c.cA[i], gates[i]);
        qB[i] = add_var(c.cB[i], 0.0);
        qC[i] = add_var(c.cC[i], 0.0);
        if (i > 0) qH[i] = add_var(c.cH[i], gates[i - 1]);
        if (i + 1 < n) qI[i] = add_var(c.cI[i], gates[i + 1]);
    }
    for (std::size_t b = 0; b < nb; ++b) {
        qD[b] = add_var(c.cD[b], 0.0);
        qG[b] = add_var(c.cD[b], 0.0);
        qE[b] = add_var(c.cE[b], 0.0);
        qF[b] = add_var(c.cE[b], 0.0);
    }

    const int nv = static_cast<int>(cap.size());
    const int m = static_cast<int>(2 * n);
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nv + m, nv + m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv + m);
    for (int k = 0; k < nv; ++k) {
        kkt(k, k) = 1.0 / cap[k];
        rhs(k) = vwork[k] / units::e_over_aF; // V -> e/aF
    }
    auto put = [&](int row, int var, double coeff) {
        if (var < 0) return;
        kkt(nv + row, var) = coeff;
        kkt(var, nv + row) = coeff;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const double Ni = cfg.N.empty() ? 1.0 : cfg.N[i];
        const double n_alpha = 0.5 * (Ni + cfg.n[i]);
        const double n_beta = 0.5 * (Ni - cfg.n[i]);
        const int ra = static_cast<int>(2 * i);
        const int rb = ra + 1;
        // alpha node
        put(ra, qA[i], 1.0);
        put(ra, qB[i], -1.0);
        if (i + 1 < n) put(ra, qD[i], 1.0);
        if (i > 0) put(ra, qD[i - 1], -1.0);
        if (i + 1 < n) put(ra, qE[i], 1.0);
        if (i > 0) put(ra, qF[i - 1], -1.0);
        put(ra, qH[i], 1.0);
        put(ra, qI[i], 1.0);
        rhs(nv + ra) = -n_alpha;
        // beta node
        put(rb, qB[i], 1.0);
        put(rb, qC[i], -1.0);
        if (i + 1 < n) put(rb, qG[i], 1.0);
        if (i > 0) put(rb, qG[i - 1], -1.0);
        if (i > 0) put(rb, qE[i - 1], -1.0);
        if (i + 1 < n) put(rb, qF[i], 1.0);
        rhs(nv + rb) = -n_beta;
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible())
        throw degenerate_network("charging_oracle: singular KKT system");
    const Eigen::VectorXd sol = lu.solve(rhs);

    double e_int = 0.0; // e^2/aF
    for (int k = 0; k < nv; ++k) {
        const double q = sol(k);
        e_int += 0.5 * q * q / cap[k] - q * vwork[k] / units::e_over_aF;
    }
    return e_int * units::Ke;
}

// Curvature d2E/dn_i^2 from three oracle evaluations (exact for the
// quadratic), other qubits held at n = 0, all N = 1. Equals twice the
// (neighbor-dressed) charging energy. meV.
inline double oracle_curvature(const CapacitanceSet& c,
                               const std::vector<double>& gates,
                               std::size_t i) {
    ChargeConfig cfg;
    cfg.n.assign(c.n_qubits(), 0.0);
    const double e0 = charging_oracle(c, gates, cfg);
    cfg.n[i] = 1.0;
    const double ep = charging_oracle(c, gates, cfg);
    cfg.n[i] = -1.0;
    const double em = charging_oracle(c, gates, cfg);
    return ep + em - 2.0 * e0;
}

// Cross-curvature d2E/dn_i dn_j: the coefficient of n_i n_j in the reduced
// quadratic, from four oracle evaluations. meV.
inline double oracle_nn_coefficient(const CapacitanceSet& c,
                                    const std::vector<double>& gates,
                                    std::size_t i, std::size_t j) {
    ChargeConfig cfg;
    cfg.n.assign(c.n_qubits(), 0.0);
    auto at = [&](double ni, double nj) {
        cfg.n[i] = ni;
        cfg.n[j] = nj;
        return charging_oracle(c, gates, cfg);
    };
    return 0.25 * (at(1, 1) + at(-1, -1) - at(1, -1) - at(-1, 1));
}

} // namespace qd
