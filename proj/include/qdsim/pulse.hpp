#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "spinmodel.hpp"
#include "units.hpp"

namespace qd {

struct unreachable_gate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Frame of a timed segment. lab = the on-resonance frame with the oscillating
// drive Delta_i(tau) = amp cos(omega tau + phase) entering the I'_x term;
// rwa = the co-rotating frame with the constant rotating-wave Hamiltonian.
enum class Frame { lab, rwa };

// One qubit's drive within a segment: amplitude (meV), carrier (rad/ps,
// used by lab segments only), phase (rad).
struct QubitDrive {
    double amp = 0;
    double omega = 0;
    double phase = 0;
};

struct PulseSegment {
    double duration = 0; // ps
    Frame frame = Frame::rwa;
    std::vector<QubitDrive> drives; // size n_qubits

    bool driven() const {
        for (const QubitDrive& d : drives)
            if (d.amp != 0.0) return true;
        return false;
    }
};

// Idealized zero-duration rotation exp(i angle I'_axis) on one qubit.
struct InstantRotation {
    std::size_t qubit = 0;
    char axis = 'x';
    double angle = 0;
};

using PulseItem = std::variant<PulseSegment, InstantRotation>;

// Ordered pulse schedule. pending_z holds virtual z rotations commuted to the
// end of the sequence (phase-frame bookkeeping); u0_wrap marks sequences to be
// conjugated by the per-qubit interdot basis change at evolution time (a
// relabeling, not a physical pulse).
struct PulseSequence {
    std::size_t n_qubits = 0;
    std::vector<PulseItem> items;
    std::vector<double> pending_z;
    bool u0_wrap = false;

    explicit PulseSequence(std::size_t n = 0)
        : n_qubits(n), pending_z(n, 0.0) {}

    double total_duration() const {
        double t = 0;
        for (const PulseItem& it : items)
            if (const PulseSegment* s = std::get_if<PulseSegment>(&it))
                t += s->duration;
        return t;
    }

    void add_segment(PulseSegment s) {
        if (s.drives.size() != n_qubits)
            throw invalid_input("pulse segment: drive array size mismatch");
        if (!(s.duration > 0))
            throw invalid_input("pulse segment: duration must be positive");
        items.push_back(std::move(s));
    }

    void add_gap(double duration, Frame frame = Frame::lab) {
        PulseSegment s;
        s.duration = duration;
        s.frame = frame;
        s.drives.assign(n_qubits, QubitDrive{});
        add_segment(std::move(s));
    }

    void add_instant(std::size_t qubit, char axis, double angle) {
        if (qubit >= n_qubits)
            throw invalid_input("pulse: qubit index out of range");
        if (axis != 'x' && axis != 'y' && axis != 'z')
            throw invalid_input("pulse: axis must be x, y or z");
        items.push_back(InstantRotation{qubit, axis, angle});
    }
};

// Appends b after a. b's drive phases are advanced by a's pending virtual-z
// angles (the bookkeeping that makes virtual z rotations commute forward);
// instant x/y rotations cannot cross a pending z and are rejected then.
inline PulseSequence concat(const PulseSequence& a, const PulseSequence& b) {
    if (a.n_qubits != b.n_qubits)
        throw invalid_input("concat: qubit count mismatch");
    if (a.u0_wrap || b.u0_wrap)
        throw invalid_input("concat: cannot concatenate wrapped sequences");
    PulseSequence out = a;
    for (const PulseItem& it : b.items) {
        if (const PulseSegment* s = std::get_if<PulseSegment>(&it)) {
            PulseSegment seg = *s;
            for (std::size_t q = 0; q < out.n_qubits; ++q)
                if (seg.drives[q].amp != 0.0)
                    seg.drives[q].phase += out.pending_z[q];
            out.items.push_back(std::move(seg));
        } else {
            const InstantRotation r = std::get<InstantRotation>(it);
            if (r.axis != 'z' && out.pending_z[r.qubit] != 0.0)
                throw invalid_input(
                    "concat: instant x/y rotation after a virtual z");
            out.items.push_back(r);
        }
    }
    for (std::size_t q = 0; q < out.n_qubits; ++q)
        out.pending_z[q] += b.pending_z[q];
    return out;
}

namespace detail {

inline void fmt_num(std::string& out, double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline double parse_num(const std::string& tok) {
    double v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw invalid_input("pulse parse: bad number '" + tok + "'");
    return v;
}

} // namespace detail

// Line-oriented schedule, one record per line:
//   seq <n_qubits> <u0_wrap>
//   drive <frame> <t_start> <duration> <qubit> <amp> <omega> <phase>
//   gap <frame> <t_start> <duration>
//   rot <t_start> <qubit> <axis> <angle>
//   zend <qubit> <angle>
// Simultaneously driven qubits repeat the drive line with equal t_start and
// duration. Numbers round-trip exactly ('#' starts a comment).
inline std::string serialize_sequence(const PulseSequence& seq) {
    std::string out = "seq ";
    out += std::to_string(seq.n_qubits);
    out += seq.u0_wrap ? " 1\n" : " 0\n";
    double t = 0;
    for (const PulseItem& it : seq.items) {
        if (const PulseSegment* s = std::get_if<PulseSegment>(&it)) {
            const char* frame = s->frame == Frame::lab ? "lab" : "rwa";
            if (!s->driven()) {
                out += "gap ";
                out += frame;
                out += ' ';
                detail::fmt_num(out, t);
                out += ' ';
                detail::fmt_num(out, s->duration);
                out += '\n';
            } else {
                for (std::size_t q = 0; q < seq.n_qubits; ++q) {
                    const QubitDrive& d = s->drives[q];
                    if (d.amp == 0.0) continue;
                    out += "drive ";
                    out += frame;
                    out += ' ';
                    detail::fmt_num(out, t);
                    out += ' ';
                    detail::fmt_num(out, s->duration);
                    out += ' ';
                    out += std::to_string(q);
                    out += ' ';
                    detail::fmt_num(out, d.amp);
                    out += ' ';
                    detail::fmt_num(out, d.omega);
                    out += ' ';
                    detail::fmt_num(out, d.phase);
                    out += '\n';
                }
            }
            t += s->duration;
        } else {
            const InstantRotation& r = std::get<InstantRotation>(it);
            out += "rot ";
            detail::fmt_num(out, t);
            out += ' ';
            out += std::to_string(r.qubit);
            out += ' ';
            out += r.axis;
            out += ' ';
            detail::fmt_num(out, r.angle);
            out += '\n';
        }
    }
    for (std::size_t q = 0; q < seq.n_qubits; ++q) {
        if (seq.pending_z[q] == 0.0) continue;
        out += "zend ";
        out += std::to_string(q);
        out += ' ';
        detail::fmt_num(out, seq.pending_z[q]);
        out += '\n';
    }
    return out;
}

inline PulseSequence parse_sequence(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    PulseSequence seq;
    bool have_header = false;
    PulseSegment open; // segment being assembled from drive lines
    double open_t = -1;
    auto flush_open = [&]() {
        if (open_t >= 0) {
            seq.items.push_back(open);
            open_t = -1;
        }
    };
    while (std::getline(in, line)) {
        if (const auto pos = line.find('#'); pos != std::string::npos)
            line.erase(pos);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok.empty()) continue;
        if (tok[0] == "seq") {
            if (have_header || tok.size() != 3)
                throw invalid_input("pulse parse: bad seq header");
            seq = PulseSequence(
                static_cast<std::size_t>(detail::parse_num(tok[1])));
            seq.u0_wrap = tok[2] == "1";
            have_header = true;
            continue;
        }
        if (!have_header)
            throw invalid_input("pulse parse: missing seq header");
        if (tok[0] == "gap") {
            if (tok.size() != 4) throw invalid_input("pulse parse: bad gap");
            flush_open();
            PulseSegment s;
            s.frame = tok[1] == "lab" ? Frame::lab : Frame::rwa;
            s.duration = detail::parse_num(tok[3]);
            s.drives.assign(seq.n_qubits, QubitDrive{});
            seq.items.push_back(std::move(s));
        } else if (tok[0] == "drive") {
            if (tok.size() != 8) throw invalid_input("pulse parse: bad drive");
            const double t0 = detail::parse_num(tok[2]);
            const double dur = detail::parse_num(tok[3]);
            const auto q = static_cast<std::size_t>(detail::parse_num(tok[4]));
            if (q >= seq.n_qubits)
                throw invalid_input("pulse parse: qubit out of range");
            if (open_t != t0) {
                flush_open();
                open = PulseSegment{};
                open.frame = tok[1] == "lab" ? Frame::lab : Frame::rwa;
                open.duration = dur;
                open.drives.assign(seq.n_qubits, QubitDrive{});
                open_t = t0;
            } else if (open.duration != dur) {
                throw invalid_input("pulse parse: inconsistent segment lines");
            }
            open.drives[q] = {detail::parse_num(tok[5]),
                              detail::parse_num(tok[6]),
                              detail::parse_num(tok[7])};
        } else if (tok[0] == "rot") {
            if (tok.size() != 5 || tok[3].size() != 1)
                throw invalid_input("pulse parse: bad rot");
            flush_open();
            seq.add_instant(static_cast<std::size_t>(detail::parse_num(tok[2])),
                            tok[3][0], detail::parse_num(tok[4]));
        } else if (tok[0] == "zend") {
            if (tok.size() != 3) throw invalid_input("pulse parse: bad zend");
            flush_open();
            const auto q = static_cast<std::size_t>(detail::parse_num(tok[1]));
            if (q >= seq.n_qubits)
                throw invalid_input("pulse parse: qubit out of range");
            seq.pending_z[q] += detail::parse_num(tok[2]);
        } else {
            throw invalid_input("pulse parse: unknown record '" + tok[0] + "'");
        }
    }
    flush_open();
    if (!have_header) throw invalid_input("pulse parse: empty schedule");
    return seq;
}

enum class PulseMode { ideal, physical };

struct PulseConfig {
    PulseMode mode = PulseMode::ideal;
    double amp = 0;              // drive amplitude, meV; 0 = 4% of min 2t
    std::size_t cp_cycles = 64;  // Carr-Purcell cycles per coupling gate
    bool composite_z = false;    // realize z rotations as x(pi/2) y x(-pi/2)
};

// Assembles the standard gates as pulse schedules against fixed chain
// parameters. Ideal mode uses instantaneous rotations; physical mode emits
// finite rotating-frame drive segments (z rotations become phase-frame
// bookkeeping unless composite_z). Free evolution always runs in the
// on-resonance frame; treating drive segments and free evolution in their
// respective frames as directly composable is the usual idealization.
struct GateCompiler {
    SpinChainParams params;
    PulseConfig cfg;

    double amp_for_uniform() const {
        if (cfg.amp > 0) return cfg.amp;
        double tmin = params.t[0];
        for (double tv : params.t) tmin = std::min(tmin, std::abs(tv));
        if (!(tmin > 0))
            throw invalid_input("gate compiler: cannot pick a drive "
                                "amplitude, set cfg.amp");
        return 0.04 * 2.0 * tmin;
    }

    PulseSequence empty() const { return PulseSequence(params.n_qubits); }

    PulseSequence rotation_pulse(std::size_t qubit, char axis,
                                 double angle) const {
        params.validate();
        if (qubit >= params.n_qubits)
            throw invalid_input("rotation_pulse: qubit out of range");
        if (axis != 'x' && axis != 'y' && axis != 'z')
            throw invalid_input("rotation_pulse: axis must be x, y or z");
        if (std::abs(angle) > 2.0 * M_PI + 1e-12)
            throw invalid_input("rotation_pulse: |angle| must be <= 2 pi");
        PulseSequence seq = empty();
        if (angle == 0.0) return seq;
        if (cfg.mode == PulseMode::ideal) {
            seq.add_instant(qubit, axis, angle);
            return seq;
        }
        if (axis == 'z') {
            if (cfg.composite_z) {
                PulseSequence s1 = rotation_pulse(qubit, 'x', M_PI / 2);
                PulseSequence s2 = rotation_pulse(qubit, 'y', angle);
                PulseSequence s3 = rotation_pulse(qubit, 'x', -M_PI / 2);
                return concat(concat(s1, s2), s3);
            }
            seq.pending_z[qubit] += angle;
            return seq;
        }
        const double amp = amp_for_uniform();
        PulseSegment s;
        s.frame = Frame::rwa;
        s.duration = 2.0 * units::hbar * std::abs(angle) / amp;
        s.drives.assign(params.n_qubits, QubitDrive{});
        double phase = (axis == 'y') ? M_PI / 2 : 0.0;
        if (angle < 0) phase += M_PI;
        s.drives[qubit] = {amp, 2.0 * params.t[qubit] / units::hbar, phase};
        seq.add_segment(std::move(s));
        return seq;
    }

    // One tau - pi_y - 2tau - pi_y - tau cycle (repeated n_cycles times) with
    // simultaneous pi_y pulses on every qubit; the gaps evolve the undriven
    // on-resonance Hamiltonian.
    PulseSequence carr_purcell(double tau, std::size_t n_cycles = 1) const {
        params.validate();
        if (!(tau > 0)) throw invalid_input("carr_purcell: tau must be > 0");
        if (n_cycles == 0)
            throw invalid_input("carr_purcell: need at least one cycle");
        PulseSequence seq = empty();
        auto pi_y_all = [&]() {
            if (cfg.mode == PulseMode::ideal) {
                for (std::size_t q = 0; q < params.n_qubits; ++q)
                    seq.add_instant(q, 'y', M_PI);
            } else {
                const double amp = amp_for_uniform();
                PulseSegment s;
                s.frame = Frame::rwa;
                s.duration = 2.0 * units::hbar * M_PI / amp;
                s.drives.assign(params.n_qubits, QubitDrive{});
                for (std::size_t q = 0; q < params.n_qubits; ++q)
                    s.drives[q] = {amp, 2.0 * params.t[q] / units::hbar,
                                   M_PI / 2};
                seq.add_segment(std::move(s));
            }
        };
        for (std::size_t c = 0; c < n_cycles; ++c) {
            seq.add_gap(tau);
            pi_y_all();
            seq.add_gap(2.0 * tau);
            pi_y_all();
            seq.add_gap(tau);
        }
        return seq;
    }

    // Carr-Purcell-framed free evolution accumulating coupling phase theta on
    // the adjacent pair (i, j): the ideal result is exp(i theta I'_x I'_x) up
    // to a global sign when theta has to be reached modulo 4 pi.
    PulseSequence coupling_gate(std::size_t i, std::size_t j,
                                double theta) const {
        params.validate();
        if (params.grid)
            throw invalid_input("coupling_gate: chain mode only");
        if (i > j) std::swap(i, j);
        if (j != i + 1 || j >= params.n_qubits)
            throw invalid_input("coupling_gate: qubits must be adjacent");
        if (theta == 0.0) return empty();
        const double jc = params.j[i];
        if (jc == 0.0)
            throw unreachable_gate("coupling_gate: J = 0 on the bond");
        // free evolution advances the phase by -J T / hbar; fold theta into
        // the reachable window
        double target = std::fmod(theta, 4.0 * M_PI);
        if (jc > 0 && target > 0) target -= 4.0 * M_PI;
        if (jc < 0 && target < 0) target += 4.0 * M_PI;
        const double total = -units::hbar * target / jc;
        const double tau = total / (4.0 * static_cast<double>(cfg.cp_cycles));
        return carr_purcell(tau, cfg.cp_cycles);
    }

    // U0 R'_ix(pi/2) R'_jy(pi/2) R'_jx(pi/2) R_ij(-pi) R'_jy(-pi/2) U0 with
    // i = target, j = control; equals CNOT up to a global phase.
    PulseSequence cnot_sequence(std::size_t control, std::size_t target) const {
        if (control == target)
            throw invalid_input("cnot_sequence: control equals target");
        PulseSequence seq = rotation_pulse(target, 'y', -M_PI / 2);
        seq = concat(seq, coupling_gate(control, target, -M_PI));
        seq = concat(seq, rotation_pulse(target, 'x', M_PI / 2));
        seq = concat(seq, rotation_pulse(target, 'y', M_PI / 2));
        seq = concat(seq, rotation_pulse(control, 'x', M_PI / 2));
        seq.u0_wrap = true;
        return seq;
    }
};

} // namespace qd
