#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "rng.hpp"

namespace qd {

struct saturation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One FET segment of the series readout channel. overdrive = V_g - V_th in
// volts, dvth the qubit-induced threshold shift, eta the mobility-reduction
// factor of the segment's substrate.
struct FetSegment {
    double overdrive = 0; // V
    double eta = 1;
    double dvth = 0; // V
};

struct FetChainProblem {
    double lambda = 1; // overall conductance prefactor, sets the current unit
    double theta = 0;  // 1/V, velocity-saturation parameter
    double v_drain = 0;
    std::vector<FetSegment> segments;

    void validate() const {
        if (!(lambda > 0))
            throw invalid_input("fet chain: lambda must be positive");
        if (theta < 0) throw invalid_input("fet chain: theta must be >= 0");
        if (!(v_drain > 0))
            throw invalid_input("fet chain: v_drain must be positive");
        if (segments.empty()) throw invalid_input("fet chain: no segments");
        for (std::size_t i = 0; i < segments.size(); ++i) {
            if (!(segments[i].eta > 0))
                throw invalid_input("fet chain: segment " + std::to_string(i) +
                                    ": eta must be positive");
            if (!(segments[i].overdrive > 0))
                throw invalid_input("fet chain: segment " + std::to_string(i) +
                                    ": overdrive must be positive");
        }
    }
};

// Triode-region current of one segment between source potential v_lo and
// drain potential v_hi:
//   I = lambda [ (G - dVth)(v_hi - v_lo) - (eta/2)(v_hi^2 - v_lo^2) ]
//       / (1 + theta (v_hi - v_lo))
inline double segment_current(double lambda, double theta,
                              const FetSegment& seg, double v_lo,
                              double v_hi) {
    const double g = seg.overdrive - seg.dvth;
    const double dv = v_hi - v_lo;
    return lambda * (g * dv - 0.5 * seg.eta * (v_hi * v_hi - v_lo * v_lo)) /
           (1.0 + theta * dv);
}

// Inverts one segment: given the source potential and the series current,
// returns the drain potential on the rising branch. The defining relation is
// quadratic in x = v_hi - v_lo:
//   (lambda eta / 2) x^2 - b x + I = 0,  b = lambda (G - dVth - eta v_lo)
//                                            - I theta
// and the rising branch is the smaller root. No real root, or a negative b,
// means the segment cannot carry I from this source potential.
inline double segment_step(double lambda, double theta, const FetSegment& seg,
                           double v_lo, double current) {
    if (current == 0.0) return v_lo;
    if (current < 0)
        throw invalid_input("segment_step: current must be >= 0");
    const double g = seg.overdrive - seg.dvth;
    const double a = 0.5 * lambda * seg.eta;
    const double b = lambda * (g - seg.eta * v_lo) - current * theta;
    const double disc = b * b - 4.0 * a * current;
    if (!(b > 0) || disc < 0)
        throw saturation_error("segment_step: current exceeds segment "
                               "capacity");
    // smaller root, evaluated in the cancellation-safe form
    const double x = 2.0 * current / (b + std::sqrt(disc));
    return v_lo + x;
}

struct ChainSolution {
    double current = 0;
    std::vector<double> v_nodes; // size N+1, v_nodes[0] = 0 at the source
    std::size_t iterations = 0;
    double residual = 0; // v_nodes.back() - v_drain
};

namespace detail {

// Marches the node potentials for a trial current. The trial is expressed
// per unit lambda, under which the node profile is invariant (the segment
// relation only ever sees I / lambda). Returns the index of the first
// saturating segment, or npos if the chain is traversed.
inline constexpr std::size_t march_ok = static_cast<std::size_t>(-1);

inline std::size_t march_chain(const FetChainProblem& prob, double mu,
                               std::vector<double>& nodes) {
    nodes.assign(prob.segments.size() + 1, 0.0);
    for (std::size_t i = 0; i < prob.segments.size(); ++i) {
        try {
            nodes[i + 1] = segment_step(1.0, prob.theta, prob.segments[i],
                                        nodes[i], mu);
        } catch (const saturation_error&) {
            return i;
        }
    }
    return march_ok;
}

} // namespace detail

// Solves the series chain for the common current: bisects the current until
// the marched drain-node potential matches v_drain. Saturation (the drain
// voltage exceeding what the chain can drop while staying on the triode
// branch everywhere) is reported as an error naming the binding segment.
inline ChainSolution solve_chain(const FetChainProblem& prob,
                                 double tol = 1e-10,
                                 std::size_t max_iter = 200) {
    prob.validate();
    std::vector<double> nodes;

    double lo = 0.0; // always marches fully with drain node < v_drain
    double hi = 1.0; // grows until it brackets
    std::size_t used = 0;
    while (true) {
        if (++used > max_iter)
            throw saturation_error("solve_chain: failed to bracket the "
                                   "current");
        if (detail::march_chain(prob, hi, nodes) != detail::march_ok)
            break; // beyond chain capacity, usable as the upper bracket
        if (nodes.back() >= prob.v_drain) break;
        lo = hi;
        hi *= 2.0;
    }

    for (; used < max_iter; ++used) {
        const double mid = 0.5 * (lo + hi);
        const bool ok = detail::march_chain(prob, mid, nodes) ==
                        detail::march_ok;
        if (ok && nodes.back() < prob.v_drain)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < tol * std::max(1.0, hi)) break;
    }
    detail::march_chain(prob, lo, nodes);
    if (prob.v_drain - nodes.back() > 1e-6 * prob.v_drain) {
        std::size_t binding = detail::march_chain(prob, hi, nodes);
        if (binding == detail::march_ok) binding = prob.segments.size() - 1;
        throw saturation_error("solve_chain: chain saturates at segment " +
                               std::to_string(binding) +
                               " before reaching the drain voltage");
    }
    ChainSolution sol;
    sol.current = lo * prob.lambda;
    sol.v_nodes = nodes;
    sol.iterations = used;
    sol.residual = nodes.back() - prob.v_drain;
    return sol;
}

// Uniform-chain template used by the transfer-curve sweeps.
inline FetChainProblem uniform_chain(std::size_t n, double overdrive,
                                     double theta, double v_drain,
                                     double lambda = 1.0) {
    FetChainProblem prob;
    prob.lambda = lambda;
    prob.theta = theta;
    prob.v_drain = v_drain;
    prob.segments.assign(n, FetSegment{overdrive, 1.0, 0.0});
    return prob;
}

struct RatioPoint {
    double v_drain = 0;
    std::vector<double> ratios; // one per probed segment
    bool saturated = false;
};

// Relative current change |I_i - I_0| / I_0 when qubit i shifts its
// segment's threshold by shift_frac * overdrive, swept over drain voltage.
// probe holds 0-based segment indices.
inline std::vector<RatioPoint> ratio_sweep(const FetChainProblem& base,
                                           const std::vector<std::size_t>& probe,
                                           double shift_frac,
                                           const std::vector<double>& v_grid) {
    base.validate();
    std::vector<RatioPoint> out;
    for (double vd : v_grid) {
        RatioPoint pt;
        pt.v_drain = vd;
        FetChainProblem prob = base;
        prob.v_drain = vd;
        try {
            const double i0 = solve_chain(prob).current;
            for (std::size_t q : probe) {
                if (q >= prob.segments.size())
                    throw invalid_input("ratio_sweep: probe index out of "
                                        "range");
                FetChainProblem shifted = prob;
                shifted.segments[q].dvth =
                    shift_frac * base.segments[q].overdrive;
                const double iq = solve_chain(shifted).current;
                pt.ratios.push_back(std::abs(iq - i0) / i0);
            }
        } catch (const saturation_error&) {
            pt.saturated = true;
            pt.ratios.clear();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

struct DistinguishPoint {
    std::size_t n = 0;
    std::vector<double> ratios; // one per probed position
    bool saturated = false;
};

// Neighbor distinguishability |I_i - I_{i+1}| / I_0 at fixed drain voltage as
// a function of chain length, probing positions i = 1, N/2, N-1 (1-based).
inline std::vector<DistinguishPoint>
distinguish_sweep(double overdrive, double theta, double v_drain,
                  double shift_frac, std::size_t n_min, std::size_t n_max) {
    if (n_min < 2 || n_max < n_min)
        throw invalid_input("distinguish_sweep: need 2 <= n_min <= n_max");
    std::vector<DistinguishPoint> out;
    for (std::size_t n = n_min; n <= n_max; ++n) {
        DistinguishPoint pt;
        pt.n = n;
        const FetChainProblem base = uniform_chain(n, overdrive, theta,
                                                   v_drain);
        try {
            const double i0 = solve_chain(base).current;
            const std::size_t probes[3] = {1, n / 2, n - 1};
            for (std::size_t pos : probes) {
                auto shifted_current = [&](std::size_t q1based) {
                    FetChainProblem prob = base;
                    prob.segments[q1based - 1].dvth = shift_frac * overdrive;
                    return solve_chain(prob).current;
                };
                const double ia = shifted_current(pos);
                const double ib = shifted_current(pos + 1);
                pt.ratios.push_back(std::abs(ia - ib) / i0);
            }
        } catch (const saturation_error&) {
            pt.saturated = true;
            pt.ratios.clear();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

// Randomizes the substrate factors: eta_i = 1 + zeta_i with zeta_i drawn
// uniformly from [-sigma, sigma]. sigma < 1 keeps every eta positive.
inline FetChainProblem random_substrate(const FetChainProblem& base,
                                        double sigma, std::uint64_t seed) {
    if (!(sigma >= 0 && sigma < 1))
        throw invalid_input("random_substrate: need 0 <= sigma < 1");
    FetChainProblem out = base;
    std::mt19937_64 gen(seed);
    for (FetSegment& seg : out.segments)
        seg.eta = 1.0 + uniform(gen, -sigma, sigma);
    return out;
}

} // namespace qd
