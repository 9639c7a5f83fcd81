// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qdsim/auxcaps.hpp"
#include "qdsim/chargeoracle.hpp"
#include "qdsim/config.hpp"
#include "qdsim/drive.hpp"
#include "qdsim/evolve.hpp"
#include "qdsim/geometry.hpp"
#include "qdsim/pulse.hpp"
#include "qdsim/readout.hpp"
#include "qdsim/rng.hpp"
#include "qdsim/scenarios.hpp"
#include "qdsim/units.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

bool in_band(double v, double quote, double f) {
    return v >= quote / f && v <= quote * f;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

Outcome criterion1() {
    const qd::CapacitanceSet c =
        qd::caps_from_geometry(qd::DeviceGeometry{});
    const qd::AuxCaps a = qd::derive_aux(c, 0);
    const qd::AuxCaps b = qd::derive_aux(c, 1);
    const double ec = qd::charging_energy(a);
    const double j = 0.25 * qd::coupling_j(a, b);
    const double f = qd::units::inv_rc_thz(1.0e6, c.cB[0]);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "E_C=%.3g meV, J=%.3g meV, rate=%.3g THz", ec, j, f);
    Outcome o;
    o.detail = buf;
    o.pass = in_band(ec, 13.0, 3.0) && in_band(j, 0.1, 10.0) &&
             in_band(f, 3.1, 3.0);
    return o;
}

Outcome criterion2() {
    std::mt19937_64 gen(7);
    double worst = 0, worst_chi = 0;
    std::size_t n_ok = 0;
    const std::size_t n_nets = 60;
    for (std::size_t k = 0; k < n_nets; ++k) {
        qd::CapacitanceSet c;
        for (int q = 0; q < 2; ++q) {
            c.cA.push_back(qd::uniform(gen, 0.1, 0.5));
            c.cB.push_back(qd::uniform(gen, 0.2, 1.0));
            c.cC.push_back(qd::uniform(gen, 0.1, 0.5));
            c.cH.push_back(0.0);
            c.cI.push_back(0.0);
        }
        qd::CapacitanceSet bare = c;
        bare.cD.assign(1, 0.0);
        bare.cE.assign(1, 0.0);
        const double d0 = std::min(qd::derive_aux(bare, 0).D,
                                   qd::derive_aux(bare, 1).D);
        const double chi_t = qd::uniform(gen, 1e-3, 4.5e-2);
        c.cD.assign(1, std::sqrt(chi_t * d0));
        c.cE.assign(1, 0.0);

        const qd::AuxCaps a = qd::derive_aux(c, 0);
        const qd::AuxCaps b = qd::derive_aux(c, 1);
        const double chi =
            std::max(a.cd * a.cd / a.D, b.cd * b.cd / b.D);
        if (chi >= 0.05) continue;
        ++n_ok;
        const double bound = 10.0 * chi * chi;
        const std::vector<double> gz(2, 0.0);

        const double s = 4.0 * qd::oracle_nn_coefficient(c, gz, 0, 1);
        const double devj =
            std::abs(qd::spin_convention_factor * qd::coupling_j(a, b) - s) /
            std::abs(s);
        const double oc = qd::oracle_curvature(c, gz, 0);
        const double devc =
            std::abs(qd::chain_curvature(c)(0, 0) - oc) / oc;
        const double r = std::max(devj, devc) / bound;
        if (r > worst) {
            worst = r;
            worst_chi = chi;
        }
    }
    Outcome o;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%zu networks, worst dev/bound=%.2e at chi=%.3g", n_ok,
                  worst, worst_chi);
    o.detail = buf;
    o.pass = n_ok >= 50 && worst <= 1.0;
    return o;
}

Outcome criterion3() {
    qd::SpinChainParams p;
    p.n_qubits = 2;
    p.t = {0.4, 0.42};
    p.omega = {0.0, 0.0};
    p.j = {0.1};
    qd::PulseConfig pc; // ideal
    qd::GateCompiler gc{p, pc};

    qd::cmat cnot = qd::cmat::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    const qd::Propagator u = qd::evolve(gc.cnot_sequence(0, 1), p);
    const double fid = qd::fidelity(u.u, cnot, qd::FidelityMode::local_z);

    double pop_err = 0;
    const int want_row[4] = {0, 1, 3, 2};
    for (int bcol = 0; bcol < 4; ++bcol)
        pop_err = std::max(
            pop_err, std::abs(std::norm(u.u(want_row[bcol], bcol)) - 1.0));

    const qd::cmat r1 = qd::evolve(gc.rotation_pulse(0, 'y', 0.9), p).u;
    const qd::cmat r2 = qd::evolve(gc.rotation_pulse(0, 'y', 1.7), p).u;
    const qd::cmat r12 = qd::evolve(gc.rotation_pulse(0, 'y', 2.6), p).u;
    const double add_err =
        1.0 - qd::fidelity(r2 * r1, r12, qd::FidelityMode::global_phase);

    Outcome o;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "fid=%.5f, pop err=%.2e, additivity err=%.2e", fid,
                  pop_err, add_err);
    o.detail = buf;
    o.pass = fid > 0.99 && pop_err <= 1e-2 && add_err <= 1e-9;
    return o;
}

Outcome criterion4() {
    qd::PulseConfig pc; // ideal
    qd::SpinChainParams p0;
    p0.n_qubits = 2;
    p0.t = {0.4, 0.47};
    p0.omega = {0.0, 0.0};
    p0.j = {0.0};
    qd::GateCompiler gc0{p0, pc};
    const qd::Propagator id = qd::evolve(gc0.carr_purcell(1.0, 1), p0);
    const double id_err =
        1.0 - qd::fidelity(id.u, qd::identity(4),
                           qd::FidelityMode::global_phase);

    qd::SpinChainParams p;
    p.n_qubits = 2;
    p.t = {0.4, 0.42};
    p.omega = {0.0, 0.0};
    p.j = {0.1};
    qd::GateCompiler gc{p, pc};
    const qd::cmat target =
        qd::expi_hermitian(qd::spin_x(0, 2) * qd::spin_x(1, 2), -M_PI);
    const double total = qd::units::hbar * M_PI / p.j[0];
    std::vector<double> infids;
    for (std::size_t n : {4, 8, 16, 32}) {
        const qd::Propagator u =
            qd::evolve(gc.carr_purcell(total / (4.0 * double(n)), n), p);
        infids.push_back(
            1.0 - qd::fidelity(u.u, target, qd::FidelityMode::global_phase));
    }
    bool mono = true;
    for (std::size_t i = 1; i < infids.size(); ++i)
        mono = mono && infids[i] < infids[i - 1];

    Outcome o;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "J=0 cycle err=%.2e; sweep %.2e > %.2e > %.2e > %.2e",
                  id_err, infids[0], infids[1], infids[2], infids[3]);
    o.detail = buf;
    o.pass = id_err <= 1e-9 && mono;
    return o;
}

Outcome criterion5() {
    qd::SpinChainParams p;
    p.n_qubits = 1;
    p.t = {0.4};
    p.omega = {0.0};
    // end a quarter drive period past 10 Rabi cycles: a commensurate
    // endpoint would echo out the counter-rotating error being measured
    const double t_drive = M_PI * qd::units::hbar / p.t[0];
    qd::EvolveOptions opts;
    opts.max_step_phase = 0.005;
    auto one = [&](double ratio) {
        const double amp = ratio * 2.0 * p.t[0];
        const double dur =
            10.0 * 4.0 * M_PI * qd::units::hbar / amp + 0.25 * t_drive;
        return qd::rwa_validate(
            p, {{amp, 2.0 * p.t[0] / qd::units::hbar, 0.0}}, dur, opts);
    };
    const qd::RwaReport full = one(0.02);
    const qd::RwaReport half = one(0.01);
    const double factor = full.infidelity / half.infidelity;
    Outcome o;
    char buf[160];
    std::snprintf(buf, sizeof buf, "infid=%.2e, halving factor=%.2f",
                  full.infidelity, factor);
    o.detail = buf;
    o.pass = full.infidelity < 1e-3 && factor > 2.5 && factor < 6.0;
    return o;
}

Outcome criterion6() {
    const qd::FetChainProblem prob = qd::uniform_chain(8, 2.0, 0.3, 1.5);
    const qd::ChainSolution sol = qd::solve_chain(prob);
    double seg_dev = 0;
    for (std::size_t i = 0; i < 8; ++i)
        seg_dev = std::max(
            seg_dev,
            std::abs(qd::segment_current(prob.lambda, prob.theta,
                                         prob.segments[i], sol.v_nodes[i],
                                         sol.v_nodes[i + 1]) -
                     sol.current) /
                sol.current);

    qd::FetChainProblem scaled = prob;
    scaled.lambda = 3.0;
    const qd::ChainSolution sol2 = qd::solve_chain(scaled);
    double node_dev = 0;
    for (std::size_t i = 0; i < sol.v_nodes.size(); ++i)
        node_dev = std::max(node_dev,
                            std::abs(sol2.v_nodes[i] - sol.v_nodes[i]));

    double law_dev = 0;
    for (std::size_t n : {2, 5, 8}) {
        const qd::ChainSolution s =
            qd::solve_chain(qd::uniform_chain(n, 2.0, 0.0, 1.5));
        const double pred = (2.0 * 1.5 - 0.5 * 2.25) / double(n);
        law_dev = std::max(law_dev, std::abs(s.current - pred) / pred);
    }

    std::vector<double> grid;
    for (double v = 0.05; v <= 2.0 + 1e-12; v += 0.05) grid.push_back(v);
    const std::vector<qd::RatioPoint> fa =
        qd::ratio_sweep(prob, {0, 3, 7}, 0.1, grid);
    // saturated points carry no current data and are skipped by contract
    bool fa_ok = true;
    std::size_t fa_usable = 0;
    for (const qd::RatioPoint& pt : fa) {
        if (pt.saturated) continue;
        ++fa_usable;
        fa_ok = fa_ok && pt.ratios[2] > pt.ratios[1] &&
                pt.ratios[1] > pt.ratios[0];
    }
    fa_ok = fa_ok && 2 * fa_usable >= grid.size();

    const std::vector<qd::DistinguishPoint> fb =
        qd::distinguish_sweep(2.0, 0.3, 1.5, 0.1, 3, 16);
    bool fb_ok = true;
    for (const qd::DistinguishPoint& pt : fb)
        fb_ok = fb_ok && !pt.saturated && pt.ratios[2] > pt.ratios[0];

    Outcome o;
    char buf[200];
    std::snprintf(
        buf, sizeof buf,
        "seg dev=%.1e, node dev=%.1e, 1/N dev=%.1e, orderings %s/%s",
        seg_dev, node_dev, law_dev, fa_ok ? "ok" : "bad",
        fb_ok ? "ok" : "bad");
    o.detail = buf;
    o.pass = seg_dev <= 1e-9 && node_dev <= 1e-12 && law_dev <= 1e-9 &&
             fa_ok && fb_ok;
    return o;
}

Outcome criterion7() {
    // round trip on a long chain with strong cross-talk
    qd::DeviceGeometry g8;
    g8.n_qubits = 8;
    qd::CapacitanceSet c8 = qd::caps_from_geometry(g8);
    for (std::size_t i = 0; i < 8; ++i) {
        if (i > 0) c8.cH[i] = 0.3 * c8.cA[i];
        if (i + 1 < 8) c8.cI[i] = 0.3 * c8.cA[i];
    }
    std::vector<qd::AuxCaps> aux8;
    for (std::size_t i = 0; i < 8; ++i)
        aux8.push_back(qd::derive_aux(c8, i));
    std::mt19937_64 gen(3);
    std::vector<double> target(8);
    for (double& v : target) v = qd::uniform(gen, -0.05, 0.05);
    const std::vector<double> got =
        qd::drive_delta(aux8, qd::crosstalk_compensate(aux8, target));
    double rt_dev = 0;
    for (std::size_t i = 0; i < 8; ++i)
        rt_dev = std::max(rt_dev, std::abs(got[i] - target[i]));

    // physical pi pulse on qubit 0 of a pair at the geometric cross ratio
    qd::DeviceGeometry g;
    qd::CapacitanceSet c = qd::caps_from_geometry(g);
    const double ratio = g.d_A / g.d_D;
    c.cI[0] = ratio * c.cA[0];
    c.cH[1] = ratio * c.cA[1];
    const std::vector<qd::AuxCaps> aux = {qd::derive_aux(c, 0),
                                          qd::derive_aux(c, 1)};
    qd::SpinChainParams p;
    p.n_qubits = 2;
    p.t = {0.4, 0.4};
    p.omega = {0.0, 0.0};
    p.j = {0.0};
    const double amp = 0.04 * 2.0 * p.t[0];
    auto pulse_fid = [&](const std::vector<double>& deltas) {
        qd::PulseSequence seq(2);
        qd::PulseSegment s;
        s.frame = qd::Frame::rwa;
        s.duration = 2.0 * qd::units::hbar * M_PI / amp;
        s.drives = {{deltas[0], 2.0 * p.t[0] / qd::units::hbar, 0.0},
                    {deltas[1], 2.0 * p.t[1] / qd::units::hbar, 0.0}};
        seq.add_segment(s);
        return qd::fidelity(qd::evolve(seq, p).u,
                            qd::expi_hermitian(qd::spin_x(0, 2), M_PI),
                            qd::FidelityMode::global_phase);
    };
    const std::vector<double> want = {amp, 0.0};
    const double fid_on =
        pulse_fid(qd::drive_delta(aux, qd::crosstalk_compensate(aux, want)));
    std::vector<double> naive(2);
    for (std::size_t i = 0; i < 2; ++i)
        naive[i] = want[i] * aux[i].D / (4.0 * aux[i].cA * aux[i].cC * 1e3);
    const double fid_off = pulse_fid(qd::drive_delta(aux, naive));

    Outcome o;
    char buf[160];
    std::snprintf(buf, sizeof buf, "round trip=%.1e meV, on=%.6f off=%.6f",
                  rt_dev, fid_on, fid_off);
    o.detail = buf;
    o.pass = rt_dev <= 1e-12 && fid_on >= fid_off;
    return o;
}

Outcome criterion8() {
    const fs::path root = fs::temp_directory_path() / "qdsim_acceptance";
    fs::remove_all(root);
    qd::SimConfig cfg = qd::default_config();
    cfg.out_dir = (root / "a").string();
    (void)qd::run_figures(cfg, qd::FigSelect::both);
    cfg.out_dir = (root / "b").string();
    (void)qd::run_figures(cfg, qd::FigSelect::both);
    bool same = true;
    for (const char* f : {"fig2a.csv", "fig2b.csv"}) {
        const std::string a = slurp(root / "a" / f);
        same = same && !a.empty() && a == slurp(root / "b" / f);
    }
    Outcome o;
    o.detail = same ? "fig2a.csv and fig2b.csv reproduced byte for byte"
                    : "outputs differ between runs";
    o.pass = same;
    return o;
}

} // namespace

int main() {
    struct Entry {
        const char* name;
        double budget_s;
        std::function<Outcome()> fn;
    };
    const Entry entries[] = {
        {"reference estimates in band", 1.0, criterion1},
        {"oracle agreement on random networks", 10.0, criterion2},
        {"ideal cnot and rotation additivity", 5.0, criterion3},
        {"refocusing identity and tau sweep", 10.0, criterion4},
        {"rotating-wave error scaling", 30.0, criterion5},
        {"readout chain invariants and orderings", 10.0, criterion6},
        {"cross-talk compensation", 60.0, criterion7},
        {"byte-stable scenario outputs", 60.0, criterion8},
    };

    int failed = 0;
    int idx = 0;
    for (const Entry& e : entries) {
        ++idx;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = e.fn();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.detail = std::string("exception: ") + ex.what();
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        const bool ok = o.pass && dt <= e.budget_s;
        if (!ok) ++failed;
        std::printf("%s criterion %d (%s): %s [%.2f s]\n",
                    ok ? "PASS" : "FAIL", idx, e.name, o.detail.c_str(),
                    dt);
    }
    return failed ? 1 : 0;
}
