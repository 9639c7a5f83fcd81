#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "qdsim/evolve.hpp"
#include "qdsim/operators.hpp"
#include "qdsim/pulse.hpp"
#include "qdsim/spinmodel.hpp"
#include "qdsim/units.hpp"

using Catch::Approx;
using namespace std::complex_literals;

namespace {

qd::SpinChainParams two_qubit(double j = 0.1) {
    qd::SpinChainParams p;
    p.n_qubits = 2;
    p.t = {0.4, 0.42};
    p.omega = {0.0, 0.0};
    p.j = {j};
    return p;
}

double err_vs(const qd::cmat& u, const qd::cmat& target) {
    return 1.0 - qd::fidelity(u, target, qd::FidelityMode::global_phase);
}

} // namespace

TEST_CASE("operator conventions") {
    // qubit 0 is the most significant bit
    const qd::cmat z0 = qd::op_on_qubit(qd::pauli_z(), 0, 2);
    CHECK(z0(0, 0).real() == Approx(1.0));
    CHECK(z0(1, 1).real() == Approx(1.0));
    CHECK(z0(2, 2).real() == Approx(-1.0));
    CHECK(z0(3, 3).real() == Approx(-1.0));

    const qd::cmat xy = qd::pauli_x() * qd::pauli_y();
    const qd::cmat iz = 1.0i * qd::pauli_z();
    CHECK((xy - iz).cwiseAbs().maxCoeff() < 1e-15);

    // exp(i s H) convention
    const qd::cmat r = qd::expi_hermitian(qd::pauli_z(), M_PI / 2.0);
    CHECK(std::abs(r(0, 0) - 1.0i) < 1e-12);
    CHECK(std::abs(r(1, 1) + 1.0i) < 1e-12);
}

TEST_CASE("qubit count guard") {
    const std::size_t saved = qd::max_qubits_limit();
    qd::max_qubits_limit() = 3;
    CHECK_THROWS_AS(qd::spin_x(0, 4), qd::dimension_overflow);
    CHECK_NOTHROW(qd::spin_x(0, 3));
    qd::max_qubits_limit() = saved;
}

TEST_CASE("interdot basis change") {
    const qd::cmat u0 = qd::u0_matrix(2);
    CHECK((u0 * u0 - qd::identity(4)).cwiseAbs().maxCoeff() < 1e-12);
    // U0 swaps the roles of x and z
    CHECK((qd::u0_transform(qd::spin_z(0, 2), 2) - qd::spin_x(0, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((qd::u0_transform(qd::spin_x(1, 2), 2) - qd::spin_z(1, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("hamiltonian builders") {
    const qd::SpinChainParams p = two_qubit();
    const qd::cmat lab = qd::build_lab_h(p);
    CHECK((lab - lab.adjoint()).cwiseAbs().maxCoeff() < 1e-14);

    // lab frame maps onto the on-resonance form under U0 per qubit
    const qd::cmat mapped = qd::u0_transform(lab, 2);
    qd::cmat manual = qd::cmat::Zero(4, 4);
    for (std::size_t i = 0; i < 2; ++i)
        manual += 2.0 * p.t[i] * qd::spin_z(i, 2) +
                  p.omega[i] * qd::spin_x(i, 2);
    manual += p.j[0] * qd::spin_x(0, 2) * qd::spin_x(1, 2);
    CHECK((mapped - manual).cwiseAbs().maxCoeff() < 1e-12);

    const qd::cmat onres = qd::build_onres_h(p, {0.0, 0.0});
    CHECK((onres - manual).cwiseAbs().maxCoeff() < 1e-12);

    // rotating frame: pure transverse drive plus exchange-like coupling
    qd::SpinChainParams p1;
    p1.n_qubits = 1;
    p1.t = {0.4};
    p1.omega = {0.0};
    const double ph = 0.7;
    const qd::cmat hr = qd::build_rwa_h(p1, {{0.05, ph}});
    const qd::cmat want = -0.5 * 0.05 *
                          (std::cos(ph) * qd::spin_x(0, 1) +
                           std::sin(ph) * qd::spin_y(0, 1));
    CHECK((hr - want).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("grid hamiltonian wiring") {
    qd::SpinChainParams p;
    p.n_qubits = 4;
    p.grid = true;
    p.nx = 2;
    p.ny = 2;
    p.t = {0.4, 0.4, 0.4, 0.4};
    p.omega = {0.0, 0.0, 0.0, 0.0};
    p.jx = {0.1, 0.0};
    p.jy = {0.0, 0.2};
    const qd::cmat h = qd::build_grid_h(p, {0.0, 0.0, 0.0, 0.0});
    qd::cmat manual = qd::cmat::Zero(16, 16);
    for (std::size_t i = 0; i < 4; ++i)
        manual += 0.8 * qd::spin_z(i, 4);
    manual += 0.1 * qd::spin_x(p.grid_index(0, 0), 4) *
              qd::spin_x(p.grid_index(1, 0), 4);
    manual += 0.2 * qd::spin_x(p.grid_index(1, 0), 4) *
              qd::spin_x(p.grid_index(1, 1), 4);
    CHECK((h - manual).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("schedule serialization round trip") {
    const qd::SpinChainParams p = two_qubit();
    qd::PulseConfig pc;
    pc.mode = qd::PulseMode::physical;
    qd::GateCompiler gc{p, pc};
    qd::PulseSequence seq = gc.cnot_sequence(0, 1);
    seq.add_gap(0.25);

    const std::string text = qd::serialize_sequence(seq);
    const qd::PulseSequence back = qd::parse_sequence(text);
    CHECK(qd::serialize_sequence(back) == text);
    CHECK(back.n_qubits == seq.n_qubits);
    CHECK(back.items.size() == seq.items.size());
    CHECK(back.total_duration() == Approx(seq.total_duration()));

    CHECK_THROWS_AS(qd::parse_sequence("seq 2 0\nbogus 1 2 3\n"),
                    qd::invalid_input);
}

TEST_CASE("rotation additivity in both modes") {
    const qd::SpinChainParams p = two_qubit();
    for (const qd::PulseMode mode :
         {qd::PulseMode::ideal, qd::PulseMode::physical}) {
        qd::PulseConfig pc;
        pc.mode = mode;
        qd::GateCompiler gc{p, pc};
        const qd::cmat u1 = qd::evolve(gc.rotation_pulse(0, 'x', 0.3), p).u;
        const qd::cmat u2 = qd::evolve(gc.rotation_pulse(0, 'x', 1.1), p).u;
        const qd::cmat u12 =
            qd::evolve(gc.rotation_pulse(0, 'x', 1.4), p).u;
        CHECK(err_vs(u2 * u1, u12) < 1e-9);
    }
}

TEST_CASE("instant rotation matches generator") {
    const qd::SpinChainParams p = two_qubit(0.0);
    qd::PulseConfig pc; // ideal
    qd::GateCompiler gc{p, pc};
    const qd::cmat u = qd::evolve(gc.rotation_pulse(1, 'y', 0.8), p).u;
    const qd::cmat want = qd::expi_hermitian(qd::spin_y(1, 2), 0.8);
    CHECK((u - want).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(gc.rotation_pulse(0, 'q', 0.1), qd::invalid_input);
    CHECK_THROWS_AS(gc.rotation_pulse(0, 'x', 7.0), qd::invalid_input);
}

TEST_CASE("refocusing cycle is identity without coupling") {
    qd::SpinChainParams p = two_qubit(0.0);
    p.t = {0.4, 0.47};
    for (const qd::PulseMode mode :
         {qd::PulseMode::ideal, qd::PulseMode::physical}) {
        qd::PulseConfig pc;
        pc.mode = mode;
        qd::GateCompiler gc{p, pc};
        const qd::Propagator u = qd::evolve(gc.carr_purcell(1.0, 1), p);
        CHECK(err_vs(u.u, qd::identity(4)) < 1e-9);
    }
}

TEST_CASE("coupling gate and cnot, ideal mode") {
    const qd::SpinChainParams p = two_qubit();
    qd::PulseConfig pc;
    qd::GateCompiler gc{p, pc};

    const qd::cmat target =
        qd::expi_hermitian(qd::spin_x(0, 2) * qd::spin_x(1, 2), -M_PI);
    const qd::Propagator ug = qd::evolve(gc.coupling_gate(0, 1, -M_PI), p);
    CHECK(qd::fidelity(ug.u, target, qd::FidelityMode::global_phase) > 0.99);

    qd::cmat cnot = qd::cmat::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    const qd::Propagator uc = qd::evolve(gc.cnot_sequence(0, 1), p);
    CHECK(qd::fidelity(uc.u, cnot, qd::FidelityMode::local_z) > 0.99);

    // truth table in populations
    const int want_row[4] = {0, 1, 3, 2};
    for (int b = 0; b < 4; ++b)
        CHECK(std::norm(uc.u(want_row[b], b)) == Approx(1.0).margin(1e-2));

    qd::SpinChainParams p0 = two_qubit(0.0);
    qd::GateCompiler gc0{p0, pc};
    CHECK_THROWS_AS(gc0.coupling_gate(0, 1, -M_PI), qd::unreachable_gate);
    CHECK_THROWS_AS(gc.coupling_gate(0, 0, -M_PI), qd::invalid_input);
}

TEST_CASE("coupling gate entangles the interdot ground state") {
    // XX eigenstates stay product states; |00> picks up concurrence 1
    const qd::cmat u =
        qd::expi_hermitian(qd::spin_x(0, 2) * qd::spin_x(1, 2), -M_PI);
    qd::cvec psi = qd::cvec::Zero(4);
    psi(0) = 1.0;
    psi = u * psi;
    CHECK(std::abs(psi(0)) == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(psi(3)) == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    const qd::cmat yy =
        qd::op_on_qubit(qd::pauli_y(), 0, 2) *
        qd::op_on_qubit(qd::pauli_y(), 1, 2);
    const std::complex<double> spin_flip =
        (psi.transpose() * (yy * psi)).value();
    CHECK(std::abs(spin_flip) == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("local-z fidelity recovers dressed targets") {
    qd::cmat cnot = qd::cmat::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    qd::cmat dress = qd::expi_hermitian(qd::spin_z(0, 2), 0.83) *
                     qd::expi_hermitian(qd::spin_z(1, 2), -2.17);
    const qd::cmat u = dress * cnot * std::exp(0.3i);
    CHECK(qd::fidelity(u, cnot, qd::FidelityMode::local_z) ==
          Approx(1.0).epsilon(1e-9));
    CHECK(qd::fidelity(u, cnot, qd::FidelityMode::global_phase) < 0.95);
}

TEST_CASE("driven lab segments honor the global clock") {
    qd::SpinChainParams p;
    p.n_qubits = 1;
    p.t = {0.4};
    p.omega = {0.0};
    const double amp = 0.05;
    const double w = 2.0 * p.t[0] / qd::units::hbar;
    const double dur = 40.0;

    qd::PulseSequence whole(1);
    qd::PulseSegment s;
    s.frame = qd::Frame::lab;
    s.duration = dur;
    s.drives = {{amp, w, 0.3}};
    whole.add_segment(s);

    qd::PulseSequence split(1);
    qd::PulseSegment h1 = s, h2 = s;
    h1.duration = 17.0;
    h2.duration = dur - 17.0;
    split.add_segment(h1);
    split.add_segment(h2);

    const qd::cmat uw = qd::evolve(whole, p).u;
    const qd::cmat us = qd::evolve(split, p).u;
    CHECK(err_vs(us, uw) < 1e-9);

    // repeat run is bit-identical
    const qd::cmat uw2 = qd::evolve(whole, p).u;
    CHECK((uw - uw2).cwiseAbs().maxCoeff() == 0.0);

    qd::EvolveOptions tight;
    tight.max_substeps = 10;
    CHECK_THROWS_AS(qd::evolve(whole, p, tight), qd::resolution_error);
}

TEST_CASE("rotating-wave validation, single qubit") {
    qd::SpinChainParams p;
    p.n_qubits = 1;
    p.t = {0.4};
    p.omega = {0.0};
    const double amp = 0.02 * 2.0 * p.t[0];
    const double dur = 2.0 * 4.0 * M_PI * qd::units::hbar / amp;
    const qd::RwaReport r =
        qd::rwa_validate(p, {{amp, 2.0 * p.t[0] / qd::units::hbar, 0.0}},
                         dur);
    CHECK(r.ratio_drive == Approx(0.02).epsilon(1e-12));
    CHECK(r.infidelity < 1e-3);
    CHECK(r.infidelity > 0.0);
}
