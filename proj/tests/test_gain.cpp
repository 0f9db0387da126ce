// This file is part of ROBMDP, a C++ library for analyzing robust Markov
// decision processes under the long-run average reward criterion.
//
// MIT License
//
// Permission is hereby granted, free of charge, to any person obtaining a copy
// of this software and associated documentation files (the "Software"), to
// deal in the Software without restriction, including without limitation the
// rights to use, copy, modify, merge, publish, distribute, sublicense, and/or
// sell copies of the Software, and to permit persons to whom the Software is
// furnished to do so, subject to the following conditions:
//
// The above copyright notice and this permission notice shall be included in
// all copies or substantial portions of the Software.
//
// THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
// IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
// FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
// AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
// LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING
// FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
// DEALINGS IN THE SOFTWARE.

#include <doctest.h>

#include <cmath>

#include "robmdp/errors.hpp"
#include "robmdp/gain.hpp"
#include "test_support.hpp"

using namespace robmdp;

TEST_CASE("single-state chain: gain equals the only reward") {
    const RobustMdpInstance t1 = testing::load_fixture("t1_single");
    const GainSolution sol = solve_constant_gain(t1, Orientation::SupInf);
    REQUIRE(sol.verdict == GainVerdict::Converged);
    CHECK(sol.alpha == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(sol.u[0] == 0.0);
    CHECK(sol.residual <= 1e-9);
    // The schedule starts at k = 4 and the second step already verifies.
    REQUIRE(sol.gamma_trace.size() == 2);
    CHECK(sol.gamma_trace[0] == doctest::Approx(0.9375));
    CHECK(sol.gamma_trace[1] == doctest::Approx(0.96875));
}

TEST_CASE("toggle chain: both orientations agree on one half") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    for (Orientation orient : {Orientation::SupInf, Orientation::InfSup}) {
        const GainSolution sol = solve_constant_gain(d2, orient);
        REQUIRE(sol.verdict == GainVerdict::Converged);
        CHECK(sol.alpha == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(sol.u[0] == doctest::Approx(0.0));
        CHECK(sol.u[1] == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(sol.residual <= 1e-6);
    }
}

TEST_CASE("matching loop: the two orientations split by one half") {
    const RobustMdpInstance mp = testing::load_fixture("mp_loop");

    const GainSolution lo = solve_constant_gain(mp, Orientation::SupInf);
    REQUIRE(lo.verdict == GainVerdict::Converged);
    CHECK(lo.alpha == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(lo.u[0] == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(lo.u[1] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(lo.u[2] == doctest::Approx(0.0).epsilon(1e-5));

    const GainSolution hi = solve_constant_gain(mp, Orientation::InfSup);
    REQUIRE(hi.verdict == GainVerdict::Converged);
    CHECK(hi.alpha == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(hi.u[0] == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(hi.u[1] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(hi.u[2] == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("transient-core chain converges to the cycle average") {
    const RobustMdpInstance d4 = testing::load_fixture("d4_transient");
    const GainSolution sol = solve_constant_gain(d4, Orientation::SupInf);
    REQUIRE(sol.verdict == GainVerdict::Converged);
    CHECK(sol.alpha == doctest::Approx(0.5).epsilon(1e-6));
    // u solves the gain equation with the transient state 0.75 below the
    // anchor: normalized to min zero this is (0.75, 1.05, 0).
    CHECK(sol.u[0] == doctest::Approx(0.75).epsilon(1e-5));
    CHECK(sol.u[1] == doctest::Approx(1.05).epsilon(1e-5));
    CHECK(sol.u[2] == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("overlap chain: the adversary pins play on the two cheap states") {
    const RobustMdpInstance d6 = testing::load_fixture("d6_overlap");
    const GainSolution sol = solve_constant_gain(d6, Orientation::SupInf);
    REQUIRE(sol.verdict == GainVerdict::Converged);
    CHECK(sol.alpha == doctest::Approx(0.45).epsilon(1e-6));
    CHECK(sol.u[0] == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(sol.u[1] == doctest::Approx(0.3).epsilon(1e-5));
    CHECK(sol.u[2] == doctest::Approx(0.75).epsilon(1e-5));
}

TEST_CASE("absorbing pair: span growth is detected, not hidden") {
    const RobustMdpInstance ab = testing::load_fixture("absorbing_pair");
    const GainSolution sol = solve_constant_gain(ab, Orientation::SupInf);
    CHECK(sol.verdict == GainVerdict::SpanUnbounded);
    CHECK(solve_constant_gain(ab, Orientation::InfSup).verdict ==
          GainVerdict::SpanUnbounded);
}

TEST_CASE("verify_constant_gain measures the miss of a wrong gain") {
    const RobustMdpInstance t1 = testing::load_fixture("t1_single");
    CHECK(verify_constant_gain(t1, {0.0}, 0.6, Orientation::SupInf) ==
          doctest::Approx(0.1));
    CHECK(verify_constant_gain(t1, {0.0}, 0.7, Orientation::SupInf) ==
          doctest::Approx(0.0));
}

TEST_CASE("verify_constant_gain is invariant to shifting u by a constant") {
    testing::InstanceGen gen(101);
    for (int rep = 0; rep < 15; ++rep) {
        const RobustMdpInstance inst = gen.finite_instance(QVariant::DiracOnly, false);
        const numvec u = gen.random_values(inst.n_states, 1.0);
        numvec shifted = u;
        for (prec_t& v : shifted) v += 2.75;
        const prec_t alpha = gen.uniform01();
        const prec_t a = verify_constant_gain(inst, u, alpha, Orientation::SupInf);
        const prec_t b = verify_constant_gain(inst, shifted, alpha, Orientation::SupInf);
        CHECK(std::fabs(a - b) < 1e-9);
    }
}

TEST_CASE("converged solutions verify and are normalized") {
    testing::InstanceGen gen(103);
    int converged = 0;
    for (int rep = 0; rep < 12; ++rep) {
        const RobustMdpInstance inst = gen.finite_instance(QVariant::DiracOnly, true);
        const GainSolution sol = solve_constant_gain(inst, Orientation::SupInf);
        if (sol.verdict != GainVerdict::Converged) continue;
        ++converged;
        CHECK(sol.alpha >= 0.0);
        CHECK(sol.alpha <= 1.0);
        prec_t umin = INFTY;
        for (prec_t v : sol.u) umin = std::min(umin, v);
        CHECK(umin == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(verify_constant_gain(inst, sol.u, sol.alpha, Orientation::SupInf) <=
              1e-6 * (1.0 + 1e-9));
    }
    // Full-support instances are communicating, so every run should converge.
    CHECK(converged == 12);
}

TEST_CASE("policy extraction recovers the toggle saddle policy") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    const GainSolution sol = solve_constant_gain(d2, Orientation::SupInf);
    REQUIRE(sol.verdict == GainVerdict::Converged);
    const StationaryControllerPolicy pol = extract_policy(d2, sol.u, sol.alpha);
    CHECK(pol.rows[0] == numvec{1.0, 0.0}); // move out of L
    CHECK(pol.rows[1] == numvec{0.0, 1.0}); // stay at R
}

TEST_CASE("policy extraction picks the hedging action at the hub") {
    const RobustMdpInstance mp = testing::load_fixture("mp_loop");
    const GainSolution sol = solve_constant_gain(mp, Orientation::SupInf);
    REQUIRE(sol.verdict == GainVerdict::Converged);
    const StationaryControllerPolicy pol = extract_policy(mp, sol.u, sol.alpha);
    // Both hub actions are worth alpha = 0 against the worst kernel; ties
    // break toward the lowest action index.
    CHECK(pol.rows[0] == numvec{1.0, 0.0});
    CHECK_NOTHROW(validate_controller_policy(mp, pol));
}

TEST_CASE("policy extraction refuses a pair that does not solve the equation") {
    const RobustMdpInstance t1 = testing::load_fixture("t1_single");
    CHECK_THROWS_AS(extract_policy(t1, {0.0}, 0.2), ExtractionFailed);
}

TEST_CASE("duality report on the toggle chain: no gap") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    const DualityReport rep = duality_report(d2);
    CHECK(rep.both_converged);
    CHECK(rep.alpha_supinf == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(rep.alpha_infsup == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::fabs(rep.gap) <= 2e-6);
    CHECK(rep.stationary_optimal);
}

TEST_CASE("duality report on the matching loop: a genuine gap of one half") {
    const RobustMdpInstance mp = testing::load_fixture("mp_loop");
    const DualityReport rep = duality_report(mp);
    CHECK(rep.both_converged);
    CHECK(rep.alpha_supinf == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(rep.alpha_infsup == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(rep.gap == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(!rep.stationary_optimal);
}

TEST_CASE("tv-ball demo: per-action rectangularity closes the gap") {
    const RobustMdpInstance tv = testing::load_fixture("sa_tv_demo");
    const DualityReport rep = duality_report(tv);
    CHECK(rep.both_converged);
    CHECK(std::fabs(rep.gap) <= 2e-6);
    CHECK(rep.stationary_optimal);
}

TEST_CASE("relative value iteration cross-checks the schedule on easy chains") {
    const RobustMdpInstance t1 = testing::load_fixture("t1_single");
    const GainSolution a = relative_value_iteration(t1, Orientation::SupInf);
    REQUIRE(a.verdict == GainVerdict::Converged);
    CHECK(a.alpha == doctest::Approx(0.7).epsilon(1e-9));

    const RobustMdpInstance mp = testing::load_fixture("mp_loop");
    const GainSolution b = relative_value_iteration(mp, Orientation::SupInf);
    REQUIRE(b.verdict == GainVerdict::Converged);
    CHECK(b.alpha == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(b.u[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("relative value iteration cycles on a periodic chain") {
    // Deterministic two-cycle: the undiscounted sweep oscillates forever.
    RobustMdpInstance swap;
    swap.n_states = 2;
    swap.n_actions = 1;
    swap.reward = {{0.0}, {1.0}};
    swap.controller_set.variant = QVariant::DiracOnly;
    StateAmbiguity amb0;
    amb0.kernels = {{{0.0, 1.0}}};
    StateAmbiguity amb1;
    amb1.kernels = {{{1.0, 0.0}}};
    swap.ambiguity = {amb0, amb1};
    validate_instance(swap);
    CHECK_THROWS_AS(relative_value_iteration(swap, Orientation::SupInf, 1e-6, 2000),
                    MaxItersExceeded);
}
