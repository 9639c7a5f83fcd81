#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qdsim/readout.hpp"

using Catch::Approx;

TEST_CASE("segment current closed form") {
    qd::FetSegment seg;
    seg.overdrive = 2.0;
    // linear-mobility, unit-substrate segment from 0 to 0.1 V
    CHECK(qd::segment_current(1.0, 0.0, seg, 0.0, 0.1) ==
          Approx(0.195).epsilon(1e-12));
    // mobility reduction divides by 1 + theta dv
    CHECK(qd::segment_current(1.0, 0.3, seg, 0.0, 0.1) ==
          Approx(0.195 / 1.03).epsilon(1e-12));
    // transconductance scale is a plain factor
    CHECK(qd::segment_current(2.5, 0.3, seg, 0.0, 0.1) ==
          Approx(2.5 * 0.195 / 1.03).epsilon(1e-12));
}

TEST_CASE("segment step inverts the current") {
    qd::FetSegment seg;
    seg.overdrive = 1.7;
    seg.eta = 1.2;
    seg.dvth = 0.05;
    const double i = qd::segment_current(0.8, 0.25, seg, 0.1, 0.43);
    const double v = qd::segment_step(0.8, 0.25, seg, 0.1, i);
    CHECK(v == Approx(0.43).margin(1e-12));

    // beyond pinch-off there is no rising-branch solution
    CHECK_THROWS_AS(qd::segment_step(0.8, 0.25, seg, 0.1, 100.0),
                    qd::saturation_error);
}

TEST_CASE("uniform chain at zero theta follows the 1/N law") {
    for (std::size_t n : {1, 2, 4, 8}) {
        const qd::FetChainProblem prob =
            qd::uniform_chain(n, 2.0, 0.0, 1.5, 0.7);
        const qd::ChainSolution sol = qd::solve_chain(prob);
        const double whole = 0.7 * (2.0 * 1.5 - 0.5 * 1.5 * 1.5);
        CHECK(sol.current == Approx(whole / double(n)).epsilon(1e-9));
    }
}

TEST_CASE("chain solution is self-consistent") {
    const qd::FetChainProblem prob = qd::uniform_chain(8, 2.0, 0.3, 1.5);
    const qd::ChainSolution sol = qd::solve_chain(prob);
    REQUIRE(sol.v_nodes.size() == 9);
    CHECK(sol.v_nodes.front() == 0.0);
    CHECK(sol.v_nodes.back() == Approx(1.5).margin(1e-9));
    for (std::size_t i = 0; i + 1 < sol.v_nodes.size(); ++i)
        CHECK(sol.v_nodes[i] < sol.v_nodes[i + 1]);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(qd::segment_current(prob.lambda, prob.theta, prob.segments[i],
                                  sol.v_nodes[i], sol.v_nodes[i + 1]) ==
              Approx(sol.current).epsilon(1e-9));

    // node profile is invariant under the transconductance scale
    qd::FetChainProblem scaled = prob;
    scaled.lambda *= 7.0;
    const qd::ChainSolution sol2 = qd::solve_chain(scaled);
    for (std::size_t i = 0; i < sol.v_nodes.size(); ++i)
        CHECK(std::abs(sol2.v_nodes[i] - sol.v_nodes[i]) <= 1e-12);
    CHECK(sol2.current == Approx(7.0 * sol.current).epsilon(1e-12));
}

TEST_CASE("chain saturation is reported") {
    // drain demand beyond what one segment can carry
    const qd::FetChainProblem prob = qd::uniform_chain(1, 1.0, 0.0, 1.5);
    CHECK_THROWS_AS(qd::solve_chain(prob), qd::saturation_error);
}

TEST_CASE("problem validation names the offender") {
    qd::FetChainProblem prob = qd::uniform_chain(3, 2.0, 0.3, 1.5);
    prob.segments[1].eta = 0.0;
    try {
        prob.validate();
        FAIL("expected validation error");
    } catch (const qd::invalid_input& e) {
        CHECK(std::string(e.what()).find("segment 1") != std::string::npos);
    }
}

TEST_CASE("sensitivity ratios order by position") {
    const qd::FetChainProblem base = qd::uniform_chain(8, 2.0, 0.3, 1.5);
    const std::vector<double> grid = {0.5, 1.0, 1.5};
    const std::vector<qd::RatioPoint> pts =
        qd::ratio_sweep(base, {0, 3, 7}, 0.1, grid);
    REQUIRE(pts.size() == 3);
    for (const qd::RatioPoint& pt : pts) {
        REQUIRE_FALSE(pt.saturated);
        CHECK(pt.ratios[2] > pt.ratios[1]);
        CHECK(pt.ratios[1] > pt.ratios[0]);
        for (double r : pt.ratios) {
            CHECK(r > 0.0);
            CHECK(r < 1.0);
        }
    }
    // sensitivity grows with drain voltage for the drain-side qubit
    CHECK(pts[2].ratios[2] > pts[0].ratios[2]);
}

TEST_CASE("length sweep keeps drain above source") {
    const std::vector<qd::DistinguishPoint> pts =
        qd::distinguish_sweep(2.0, 0.3, 1.5, 0.1, 3, 10);
    REQUIRE(pts.size() == 8);
    for (const qd::DistinguishPoint& pt : pts) {
        REQUIRE_FALSE(pt.saturated);
        CHECK(pt.ratios[2] > pt.ratios[0]);
    }
}

TEST_CASE("substrate disorder is bounded and reproducible") {
    const qd::FetChainProblem base = qd::uniform_chain(8, 2.0, 0.3, 1.5);
    const qd::FetChainProblem a = qd::random_substrate(base, 0.2, 42);
    const qd::FetChainProblem b = qd::random_substrate(base, 0.2, 42);
    const qd::FetChainProblem c = qd::random_substrate(base, 0.2, 43);
    bool same = true, differs = false;
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(a.segments[i].eta >= 0.8);
        CHECK(a.segments[i].eta <= 1.2);
        same = same && a.segments[i].eta == b.segments[i].eta;
        differs = differs || a.segments[i].eta != c.segments[i].eta;
    }
    CHECK(same);
    CHECK(differs);
    CHECK_THROWS_AS(qd::random_substrate(base, 1.0, 1), qd::invalid_input);
}

TEST_CASE("operating-point regression") {
    // frozen against this implementation's first verified run
    const qd::ChainSolution sol =
        qd::solve_chain(qd::uniform_chain(8, 2.0, 0.3, 1.5));
    CHECK(sol.current == Approx(0.221893491107).epsilon(1e-6));
    CHECK(sol.v_nodes[4] == Approx(0.532356941564).epsilon(1e-6));
}
