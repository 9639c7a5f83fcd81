#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pulse.hpp"
#include "spinmodel.hpp"
#include "units.hpp"

namespace qd {

struct resolution_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Propagator {
    cmat u;
    double duration = 0; // ps
};

struct EvolveOptions {
    double max_step_phase = 0.05; // ||H|| h / hbar cap per substep
    double max_substeps = 1e8;
};

namespace detail {

// Cheap operator-norm bound for the on-resonance Hamiltonian with drive
// amplitudes amps: each qubit contributes |t| + |amp|/2, each bond |J|/4.
inline double onres_norm_bound(const SpinChainParams& p,
                               const std::vector<double>& amps) {
    double b = 0;
    for (std::size_t i = 0; i < p.n_qubits; ++i)
        b += std::abs(p.t[i]) + 0.5 * std::abs(amps[i]);
    if (p.grid) {
        for (double jb : p.jx) b += 0.25 * std::abs(jb);
        for (double jb : p.jy) b += 0.25 * std::abs(jb);
    } else {
        for (double jb : p.j) b += 0.25 * std::abs(jb);
    }
    return b;
}

} // namespace detail

// Integrates a pulse schedule into a propagator. Rotating-frame segments and
// undriven on-resonance segments have constant Hamiltonians and are
// exponentiated in one step; driven on-resonance segments are substepped with
// midpoint sampling of Delta_i(tau) = amp_i cos(omega_i tau + phase_i), tau
// being the global schedule time so carrier phases stay coherent across
// segments. Pending virtual-z angles are applied exactly at the end, and
// u0-wrapped schedules are conjugated by the interdot basis change.
inline Propagator evolve(const PulseSequence& seq, const SpinChainParams& p,
                         EvolveOptions opts = {}) {
    p.validate();
    if (seq.n_qubits != p.n_qubits)
        throw invalid_input("evolve: schedule/params qubit count mismatch");
    const std::size_t n = p.n_qubits;
    check_qubit_count(n);
    const std::size_t dim = dim_of(n);

    cmat u = identity(dim);
    std::vector<cmat> ix_ops;
    cmat h0; // undriven on-resonance Hamiltonian, built on first use
    bool have_h0 = false;
    auto ensure_lab_ops = [&]() {
        if (have_h0) return;
        h0 = build_onres_h(p, std::vector<double>(n, 0.0));
        ix_ops.reserve(n);
        for (std::size_t q = 0; q < n; ++q) ix_ops.push_back(spin_x(q, n));
        have_h0 = true;
    };

    double tcur = 0;
    for (const PulseItem& it : seq.items) {
        if (const PulseSegment* s = std::get_if<PulseSegment>(&it)) {
            if (s->drives.size() != n)
                throw invalid_input("evolve: segment drive size mismatch");
            if (s->frame == Frame::rwa) {
                std::vector<RwaDrive> drv(n);
                for (std::size_t q = 0; q < n; ++q)
                    drv[q] = {s->drives[q].amp, s->drives[q].phase};
                const cmat h = build_rwa_h(p, drv);
                u = expi_hermitian(h, -s->duration / units::hbar) * u;
            } else if (!s->driven()) {
                ensure_lab_ops();
                u = expi_hermitian(h0, -s->duration / units::hbar) * u;
            } else {
                ensure_lab_ops();
                std::vector<double> amps(n);
                for (std::size_t q = 0; q < n; ++q) amps[q] = s->drives[q].amp;
                const double bound = detail::onres_norm_bound(p, amps);
                const double hmax =
                    opts.max_step_phase * units::hbar / std::max(bound, 1e-300);
                const double want = std::ceil(s->duration / hmax);
                if (want > opts.max_substeps)
                    throw resolution_error(
                        "evolve: driven segment needs too many substeps");
                const std::size_t steps =
                    static_cast<std::size_t>(std::max(1.0, want));
                const double h = s->duration / static_cast<double>(steps);
                for (std::size_t k = 0; k < steps; ++k) {
                    const double tm =
                        tcur + (static_cast<double>(k) + 0.5) * h;
                    cmat hm = h0;
                    for (std::size_t q = 0; q < n; ++q) {
                        const QubitDrive& d = s->drives[q];
                        if (d.amp == 0.0) continue;
                        hm -= d.amp * std::cos(d.omega * tm + d.phase) *
                              ix_ops[q];
                    }
                    u = expi_hermitian(hm, -h / units::hbar) * u;
                }
            }
            tcur += s->duration;
        } else {
            const InstantRotation& r = std::get<InstantRotation>(it);
            if (r.qubit >= n)
                throw invalid_input("evolve: rotation qubit out of range");
            cmat op;
            switch (r.axis) {
            case 'x': op = spin_x(r.qubit, n); break;
            case 'y': op = spin_y(r.qubit, n); break;
            case 'z': op = spin_z(r.qubit, n); break;
            default: throw invalid_input("evolve: bad rotation axis");
            }
            u = expi_hermitian(op, r.angle) * u;
        }
    }
    for (std::size_t q = 0; q < n; ++q)
        if (seq.pending_z.size() == n && seq.pending_z[q] != 0.0)
            u = expi_hermitian(spin_z(q, n), seq.pending_z[q]) * u;
    if (seq.u0_wrap) {
        const cmat u0 = u0_matrix(n);
        u = u0 * u * u0;
    }
    if (unitarity_error(u) > 1e-9)
        throw std::runtime_error("evolve: propagator lost unitarity");
    return {std::move(u), tcur};
}

enum class FidelityMode { global_phase, local_z };

// Gate fidelity |Tr(target^dag u)| / dim, either as-is (global_phase) or
// maximized over independent z rotations appended per qubit (local_z). The
// local-z maximum is found by coordinate ascent: with all other phases held
// fixed, the optimal phase for qubit k aligns the two half-sums of the
// weighted diagonal of u target^dag, which is a closed-form update.
inline double fidelity(const cmat& u, const cmat& target,
                       FidelityMode mode = FidelityMode::global_phase) {
    if (u.rows() != target.rows() || u.cols() != target.cols() ||
        u.rows() != u.cols())
        throw invalid_input("fidelity: shape mismatch");
    const std::size_t dim = static_cast<std::size_t>(u.rows());
    if (mode == FidelityMode::global_phase)
        return std::abs((target.adjoint() * u).trace()) /
               static_cast<double>(dim);

    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    if ((std::size_t{1} << n) != dim)
        throw invalid_input("fidelity: dimension is not a power of two");

    // a_b = (u target^dag)_bb; maximize |sum_b a_b prod_k e^{-i phi_k s_k/2}|
    // where s_k = +1 when bit k of b is 0 (I_z eigenvalue +1/2), else -1.
    std::vector<std::complex<double>> diag(dim);
    for (std::size_t b = 0; b < dim; ++b)
        diag[b] = (u.row(static_cast<Eigen::Index>(b)).array() *
                   target.row(static_cast<Eigen::Index>(b)).array().conjugate())
                      .sum();
    std::vector<double> phi(n, 0.0);
    auto weighted = [&](std::size_t b) {
        double ang = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const bool bit = (b >> (n - 1 - k)) & 1u; // qubit 0 = MSB
            ang += (bit ? 0.5 : -0.5) * phi[k];
        }
        return diag[b] * std::exp(std::complex<double>(0, ang));
    };
    double best = 0;
    for (std::size_t sweep = 0; sweep < 300; ++sweep) {
        for (std::size_t k = 0; k < n; ++k) {
            std::complex<double> s0 = 0, s1 = 0;
            for (std::size_t b = 0; b < dim; ++b) {
                const bool bit = (b >> (n - 1 - k)) & 1u;
                const std::complex<double> w =
                    weighted(b) *
                    std::exp(std::complex<double>(
                        0, (bit ? -0.5 : 0.5) * phi[k])); // strip k's factor
                (bit ? s1 : s0) += w;
            }
            phi[k] = std::arg(s0) - std::arg(s1);
        }
        std::complex<double> total = 0;
        for (std::size_t b = 0; b < dim; ++b) total += weighted(b);
        const double f = std::abs(total);
        if (f - best < 1e-13 * std::max(1.0, best) && sweep > 0) {
            best = std::max(best, f);
            break;
        }
        best = std::max(best, f);
    }
    return best / static_cast<double>(dim);
}

inline double fidelity(const Propagator& u, const cmat& target,
                       FidelityMode mode = FidelityMode::global_phase) {
    return fidelity(u.u, target, mode);
}

struct RwaReport {
    double infidelity = 0;    // 1 - F between rotating-frame lab and RWA
    double ratio_drive = 0;   // max Delta_0i / (2 t_i) over driven qubits
    double ratio_coupling = 0; // max J hbar omega / (Delta_0 2t) over bonds
    double duration = 0;      // ps
};

// Evolves one continuously driven on-resonance segment, moves the exact
// propagator into the frame rotating at each qubit's carrier, and compares
// with the rotating-wave propagator of the same duration. Undriven qubits
// rotate at their natural frequency 2t/hbar.
inline RwaReport rwa_validate(const SpinChainParams& p,
                              const std::vector<QubitDrive>& drives,
                              double duration, EvolveOptions opts = {}) {
    p.validate();
    const std::size_t n = p.n_qubits;
    if (drives.size() != n)
        throw invalid_input("rwa_validate: drive array size mismatch");
    if (!(duration > 0))
        throw invalid_input("rwa_validate: duration must be positive");

    PulseSequence seq(n);
    PulseSegment s;
    s.frame = Frame::lab;
    s.duration = duration;
    s.drives = drives;
    seq.add_segment(std::move(s));
    const Propagator lab = evolve(seq, p, opts);

    cmat rot = lab.u;
    for (std::size_t q = 0; q < n; ++q) {
        const double w = drives[q].amp != 0.0 ? drives[q].omega
                                              : 2.0 * p.t[q] / units::hbar;
        rot = expi_hermitian(spin_z(q, n), w * duration) * rot;
    }

    std::vector<RwaDrive> drv(n);
    for (std::size_t q = 0; q < n; ++q)
        drv[q] = {drives[q].amp, drives[q].phase};
    const cmat hrwa = build_rwa_h(p, drv);
    const cmat urwa = expi_hermitian(hrwa, -duration / units::hbar);

    RwaReport rep;
    rep.duration = duration;
    rep.infidelity = 1.0 - fidelity(rot, urwa, FidelityMode::global_phase);
    double amp_min = 0;
    for (std::size_t q = 0; q < n; ++q) {
        if (drives[q].amp == 0.0) continue;
        rep.ratio_drive = std::max(
            rep.ratio_drive, std::abs(drives[q].amp) / (2.0 * p.t[q]));
        const double a = std::abs(drives[q].amp);
        amp_min = amp_min == 0 ? a : std::min(amp_min, a);
    }
    double jmax = 0;
    const std::vector<double>* bond_sets[] = {&p.j, &p.jx, &p.jy};
    for (const std::vector<double>* bs : bond_sets)
        for (double jb : *bs) jmax = std::max(jmax, std::abs(jb));
    double wmax = 0;
    for (std::size_t q = 0; q < n; ++q)
        wmax = std::max(wmax, drives[q].amp != 0.0
                                  ? std::abs(drives[q].omega)
                                  : 2.0 * std::abs(p.t[q]) / units::hbar);
    double t2min = 0;
    for (double tv : p.t) {
        const double v = 2.0 * std::abs(tv);
        t2min = t2min == 0 ? v : std::min(t2min, v);
    }
    if (jmax > 0 && amp_min > 0 && t2min > 0)
        rep.ratio_coupling = jmax * units::hbar * wmax / (amp_min * t2min);
    return rep;
}

} // namespace qd
