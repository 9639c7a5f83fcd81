#pragma once

#include <string>
#include <vector>

#include "geometry.hpp"
#include "units.hpp"

namespace qd {

// Inputs for the operating-window check T << J << Delta_0 < t << (CR)^-1.
struct CriterionInput {
    double T = 0;       // meV
    double J = 0;       // meV
    double delta0 = 0;  // meV
    double t = 0;       // meV
    double R_int = 0;   // ohm
    double C_int = 0;   // aF
    double margin = 10; // required ratio for "<<"
};

struct CriterionLink {
    std::string name;
    double lhs = 0, rhs = 0; // meV
    double ratio = 0;        // rhs / lhs
    bool strict_only = false;
    bool pass = false;
};

struct CriterionReport {
    std::vector<CriterionLink> links;
    bool all_pass = false;
    double f_rc_thz = 0;  // (C_int R_int)^-1
    double e_rc_mev = 0;  // hbar / (C_int R_int)
    bool r_above_rk = false;
};

// Evaluates the inequality chain link by link. "<<" requires rhs/lhs >= margin;
// the Delta_0 < t link is strict only. The CR rate is converted to energy via
// hbar. R_int <= R_K is flagged (Coulomb blockade needs R_int > R_K).
inline CriterionReport criterion_check(const CriterionInput& in) {
    if (!(in.T > 0) || !(in.J > 0) || !(in.delta0 > 0) || !(in.t > 0) ||
        !(in.R_int > 0) || !(in.C_int > 0) || !(in.margin > 0))
        throw invalid_input("criterion_check: all inputs must be positive");

    CriterionReport rep;
    rep.f_rc_thz = units::inv_rc_thz(in.R_int, in.C_int);
    const double rc_ps = in.R_int * in.C_int * 1e-6;
    rep.e_rc_mev = units::hbar / rc_ps;
    rep.r_above_rk = in.R_int > units::RK;

    auto link = [&](const std::string& name, double lhs, double rhs,
                    bool strict_only) {
        CriterionLink l;
        l.name = name;
        l.lhs = lhs;
        l.rhs = rhs;
        l.ratio = rhs / lhs;
        l.strict_only = strict_only;
        l.pass = strict_only ? (lhs < rhs) : (l.ratio >= in.margin);
        rep.links.push_back(l);
    };
    link("T << J", in.T, in.J, false);
    link("J << Delta0", in.J, in.delta0, false);
    link("Delta0 < t", in.delta0, in.t, true);
    link("t << (CR)^-1", in.t, rep.e_rc_mev, false);

    rep.all_pass = rep.r_above_rk;
    for (const CriterionLink& l : rep.links) rep.all_pass = rep.all_pass && l.pass;
    return rep;
}

} // namespace qd
