// Compile a CNOT into a pulse schedule, print it, and score it.
#include <cstdio>

#include "qdsim/evolve.hpp"
#include "qdsim/pulse.hpp"

int main() {
    qd::SpinChainParams p;
    p.n_qubits = 2;
    p.t = {0.4, 0.42};
    p.omega = {0.0, 0.0};
    p.j = {0.1};

    qd::PulseConfig pc;
    pc.mode = qd::PulseMode::ideal;
    qd::GateCompiler gc{p, pc};

    const qd::PulseSequence seq = gc.cnot_sequence(0, 1);
    std::fputs(qd::serialize_sequence(seq).c_str(), stdout);

    qd::cmat cnot = qd::cmat::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    const qd::Propagator u = qd::evolve(seq, p);
    std::printf("duration %.3f ps, fidelity (up to local z) %.6f\n",
                u.duration, qd::fidelity(u.u, cnot, qd::FidelityMode::local_z));
    return 0;
}
