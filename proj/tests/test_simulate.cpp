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
#include <cstdint>

#include "robmdp/errors.hpp"
#include "robmdp/oracle.hpp"
#include "robmdp/simulate.hpp"
#include "test_support.hpp"

using namespace robmdp;

namespace {

PolicySpec stationary_ctrl(StationaryControllerPolicy pol) {
    PolicySpec spec;
    spec.kind = ControllerKind::Stationary;
    spec.stationary = std::move(pol);
    return spec;
}

AdversarySpec stationary_adv(StationaryAdversaryPolicy pol) {
    AdversarySpec spec;
    spec.kind = AdversaryKind::Stationary;
    spec.stationary = std::move(pol);
    return spec;
}

} // namespace

TEST_CASE("identical seeds and streams reproduce the generator bit for bit") {
    CounterRng a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    bool all_equal = true, stream_differs = false, seed_differs = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t va = a.next();
        if (va != b.next()) all_equal = false;
        if (va != c.next()) stream_differs = true;
        if (va != d.next()) seed_differs = true;
    }
    CHECK(all_equal);
    CHECK(stream_differs);
    CHECK(seed_differs);
}

TEST_CASE("uniform01 lands in the half-open unit interval") {
    CounterRng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const prec_t u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("categorical sampling respects supports and frequencies") {
    CounterRng rng(11);
    long counts[2] = {0, 0};
    for (int i = 0; i < 20000; ++i) ++counts[rng.categorical({0.25, 0.75})];
    CHECK(std::fabs(static_cast<prec_t>(counts[0]) / 20000.0 - 0.25) < 0.02);

    for (int i = 0; i < 200; ++i) {
        CHECK(rng.categorical({0.0, 1.0, 0.0}) == 1);
        CHECK(rng.categorical({1.0, 0.0}) == 0);
    }
    CHECK_THROWS_AS(rng.categorical({0.0, 0.0}), ValidationError);
}

TEST_CASE("single-state run produces the constant reward exactly") {
    const RobustMdpInstance t1 = testing::load_fixture("t1_single");
    const RunStats stats = run(t1, {1.0}, stationary_ctrl(dirac_policy(t1, {0})),
                               stationary_adv(kernel_policy(t1, {0})), 500, 4, 0);
    CHECK(stats.mean == doctest::Approx(0.7).epsilon(1e-12));
    // All trajectories run the identical deterministic arithmetic.
    CHECK(stats.std_error == 0.0);
    REQUIRE(stats.trajectory_means.size() == 4);
    for (prec_t m : stats.trajectory_means) CHECK(m == stats.trajectory_means[0]);
    CHECK(stats.limsup_proxy == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(stats.liminf_proxy == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(stats.hitting_times.empty());
    REQUIRE(!stats.series.empty());
    CHECK(stats.series.back().first == 500);
    CHECK(stats.series.back().second == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("runs are reproducible and seeds matter") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    const PolicySpec ctrl = stationary_ctrl(dirac_policy(d2, {0, 1}));
    const AdversarySpec adv = stationary_adv(kernel_policy(d2, {1, 1}));
    const numvec mu = {0.5, 0.5};

    const RunStats a = run(d2, mu, ctrl, adv, 2000, 4, 99);
    const RunStats b = run(d2, mu, ctrl, adv, 2000, 4, 99);
    CHECK(a.mean == b.mean);
    CHECK(a.trajectory_means == b.trajectory_means);
    CHECK(a.series == b.series);

    const RunStats c = run(d2, mu, ctrl, adv, 2000, 4, 100);
    CHECK(a.mean != c.mean);
}

TEST_CASE("monte carlo means track the exact chain gain") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    // Saddle pair: (move, stay) against the leaky kernels mixes to gain 1/2.
    const RunStats stats = run(d2, {1.0, 0.0}, stationary_ctrl(dirac_policy(d2, {0, 1})),
                               stationary_adv(kernel_policy(d2, {1, 1})), 100000, 8, 1);
    REQUIRE(stats.std_error > 0.0);
    CHECK(std::fabs(stats.mean - 0.5) <= 4.0 * stats.std_error);
    CHECK(stats.limsup_proxy >= stats.liminf_proxy);
    CHECK(std::fabs(stats.limsup_proxy - 0.5) < 0.02);
}

TEST_CASE("the step log records the transitions that were simulated") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    StepLog log;
    const RunStats stats = run(d2, {1.0, 0.0}, stationary_ctrl(dirac_policy(d2, {0, 1})),
                               stationary_adv(kernel_policy(d2, {0, 0})), 50, 2, 5, &log);
    (void)stats;
    REQUIRE(log.records.size() == 100);
    long k = 0;
    for (const StepRecord& rec : log.records) {
        k = rec.k;
        CHECK(rec.used_phase2_ctrl); // plain stationary specs always report phase 2
        CHECK(rec.used_phase2_adv);
        // Controller is (move, stay) and the kernels are deterministic here:
        // L always hops to R, R always stays.
        if (rec.state == 0) CHECK(rec.next == 1);
        if (rec.state == 1) CHECK(rec.next == 1);
    }
    CHECK(k == 50);
}

TEST_CASE("two-phase adversary switches at the first arrival at the target") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");

    AdversarySpec adv;
    adv.kind = AdversaryKind::TwoPhaseAdversary;
    adv.target = 1;
    adv.pre_target = kernel_policy(d2, {0, 0});  // deterministic push toward R
    adv.stationary = kernel_policy(d2, {1, 1});  // leaky afterwards

    StepLog log;
    const RunStats stats = run(d2, {1.0, 0.0}, stationary_ctrl(dirac_policy(d2, {0, 0})),
                               adv, 400, 4, 17, &log);

    REQUIRE(stats.hitting_times.size() == 4);
    for (long t : stats.hitting_times) CHECK(t == 1); // L -> R surely under kernel 0

    for (const StepRecord& rec : log.records) {
        const bool hit_already = rec.k > stats.hitting_times[static_cast<std::size_t>(
                                             rec.trajectory)];
        CHECK(rec.used_phase2_adv == hit_already);
        CHECK(rec.used_phase2_ctrl); // the controller here is plain stationary
        if (!rec.used_phase2_adv && rec.state == 0)
            CHECK(rec.next == 1); // pre-target kernel 0 moves L to R surely
    }
}

TEST_CASE("a start on the target begins in phase two immediately") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    AdversarySpec adv;
    adv.kind = AdversaryKind::TwoPhaseAdversary;
    adv.target = 0;
    adv.pre_target = kernel_policy(d2, {0, 0});
    adv.stationary = kernel_policy(d2, {1, 1});

    StepLog log;
    const RunStats stats = run(d2, {1.0, 0.0}, stationary_ctrl(dirac_policy(d2, {0, 0})),
                               adv, 10, 2, 23, &log);
    REQUIRE(stats.hitting_times.size() == 2);
    CHECK(stats.hitting_times[0] == 0); // X_0 = L = target counts
    CHECK(stats.hitting_times[1] == 0);
    for (const StepRecord& rec : log.records) CHECK(rec.used_phase2_adv);
}

TEST_CASE("two-phase controller switches policy at the target") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    PolicySpec ctrl;
    ctrl.kind = ControllerKind::TwoPhaseController;
    ctrl.target = 1;
    ctrl.pre_target = dirac_policy(d2, {0, 0});  // move until R is reached
    ctrl.stationary = dirac_policy(d2, {1, 1});  // then stay

    StepLog log;
    const RunStats stats = run(d2, {1.0, 0.0}, ctrl,
                               stationary_adv(kernel_policy(d2, {0, 0})), 30, 3, 29, &log);
    REQUIRE(stats.hitting_times.size() == 3);
    for (const StepRecord& rec : log.records) {
        const bool hit_already = rec.k > stats.hitting_times[static_cast<std::size_t>(
                                             rec.trajectory)];
        CHECK(rec.used_phase2_ctrl == hit_already);
        if (rec.used_phase2_ctrl && rec.state == 1)
            CHECK(rec.action == 1); // stay once arrived
        if (!rec.used_phase2_ctrl)
            CHECK(rec.action == 0); // move beforehand
    }
}

TEST_CASE("specs are validated before any sampling") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    const PolicySpec good = stationary_ctrl(dirac_policy(d2, {0, 1}));
    const AdversarySpec adv = stationary_adv(kernel_policy(d2, {0, 0}));

    CHECK_THROWS_AS(run(d2, {0.7, 0.7}, good, adv, 10, 1, 0), ValidationError);
    CHECK_THROWS_AS(run(d2, {1.0, 0.0}, good, adv, 0, 1, 0), ValidationError);
    CHECK_THROWS_AS(run(d2, {1.0, 0.0}, good, adv, 10, 0, 0), ValidationError);

    PolicySpec bad_two_phase = good;
    bad_two_phase.kind = ControllerKind::TwoPhaseController;
    bad_two_phase.target = 9;
    CHECK_THROWS_AS(run(d2, {1.0, 0.0}, bad_two_phase, adv, 10, 1, 0), ValidationError);
}

TEST_CASE("the learner needs every dirac action in the decision set") {
    RobustMdpInstance d4 = testing::load_fixture("d4_transient");
    PolicySpec learner;
    learner.kind = ControllerKind::ModelBasedLearner;
    const AdversarySpec adv = stationary_adv(kernel_policy(d4, {0, 0, 0}));
    // d4 lists (1,0) and (0.5,0.5): the Dirac action 1 is missing.
    CHECK_THROWS_AS(run(d4, {1.0, 0.0, 0.0}, learner, adv, 10, 1, 0), ValidationError);

    d4.controller_set.distributions.push_back({0.0, 1.0});
    validate_instance(d4);
    CHECK_NOTHROW(run(d4, {1.0, 0.0, 0.0}, learner, adv, 64, 1, 0));
}

TEST_CASE("the learner locks onto the rewarding arm of the matching loop") {
    const RobustMdpInstance mp = testing::load_fixture("mp_loop");
    PolicySpec learner;
    learner.kind = ControllerKind::ModelBasedLearner;

    // Against the fixed kernel-0 adversary the informed stationary play earns
    // 1/2; the learner must approach it from samples alone.
    const RunStats stats = run(mp, {1.0, 0.0, 0.0}, learner,
                               stationary_adv(kernel_policy(mp, {0, 0, 0})), 100000, 4, 3);
    CHECK(stats.mean >= 0.45);

    StepLog log;
    run(mp, {1.0, 0.0, 0.0}, learner, stationary_adv(kernel_policy(mp, {0, 0, 0})), 32, 1, 3,
        &log);
    for (const StepRecord& rec : log.records) CHECK(!rec.used_phase2_ctrl);
}

TEST_CASE("hitting time estimates on deterministic and leaky pushes") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    const StationaryControllerPolicy move = dirac_policy(d2, {0, 0});

    const HittingEstimate trivial =
        estimate_hitting_time(d2, 1, move, kernel_policy(d2, {0, 0}), 1, 200, 1);
    CHECK(trivial.mean == 0.0);
    CHECK(trivial.ci_halfwidth == 0.0);

    const HittingEstimate sure =
        estimate_hitting_time(d2, 0, move, kernel_policy(d2, {0, 0}), 1, 200, 1);
    CHECK(sure.mean == 1.0);
    CHECK(sure.ci_halfwidth == 0.0);
    CHECK(!sure.horizon_exceeded);

    // The leaky kernel keeps L with probability 1/2: geometric mean 2.
    const HittingEstimate leaky =
        estimate_hitting_time(d2, 0, move, kernel_policy(d2, {1, 0}), 1, 4000, 1);
    CHECK(leaky.ci_halfwidth > 0.0);
    CHECK(std::fabs(leaky.mean - 2.0) <= 2.0 * leaky.ci_halfwidth);
}

TEST_CASE("hitting estimates respect the horizon flag") {
    const RobustMdpInstance ab = testing::load_fixture("absorbing_pair");
    const HittingEstimate stuck = estimate_hitting_time(
        ab, 0, dirac_policy(ab, {0, 0}), kernel_policy(ab, {0, 0}), 1, 5, 1, 50);
    CHECK(stuck.horizon_exceeded);
    CHECK(stuck.mean == 50.0);
}

TEST_CASE("built certificates validate empirically on the toggle chain") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    const StationaryControllerPolicy delta = dirac_policy(d2, {0, 1});
    const auto [adv, cert] = build_adversary_to_target(d2, delta, 1);
    const CertificateCheck check = validate_certificate(d2, delta, adv, cert, 4000, 7);
    CHECK(check.mean_within_bound);
    CHECK(check.prob_within_bound);
    CHECK(check.max_mean <= cert.bound);
    CHECK(check.min_short_prob >= cert.delta_prime - 3.0 * check.sigma_short_prob);
}

TEST_CASE("gap demo passes degenerately when there is no gap") {
    const RobustMdpInstance t1 = testing::load_fixture("t1_single");
    const GapDemoReport rep = hd_s_gap_demo(t1, 1e-6, 2000, 2, 0);
    CHECK(rep.pass);
    CHECK(std::fabs(rep.duality.gap) <= 1e-6);
    CHECK(rep.adversary_comm == CommClass::Communicating);
    REQUIRE(!rep.adversary_means.empty());
    CHECK(rep.adversary_means[0] == doctest::Approx(0.7));
}

TEST_CASE("gap demo closes the matching-loop gap with history-dependent play") {
    const RobustMdpInstance mp = testing::load_fixture("mp_loop");
    const GapDemoReport rep = hd_s_gap_demo(mp, 1e-6, 30000, 4, 1);
    CHECK(rep.duality.gap == doctest::Approx(0.5).epsilon(1e-6));
    REQUIRE(rep.adversary_means.size() == 2);
    CHECK(rep.learner_min_mean >= 0.4);
    CHECK(rep.learner_min_mean > rep.threshold);
    CHECK(rep.pass);
}

TEST_CASE("gap demo refuses a non-communicating adversary side") {
    const RobustMdpInstance ab = testing::load_fixture("absorbing_pair");
    CHECK_THROWS_AS(hd_s_gap_demo(ab, 1e-6, 100, 1, 0), PreconditionFailed);
}

TEST_CASE("simulated unichain pairs agree with the exact gain") {
    testing::InstanceGen gen(137);
    int covered = 0;
    for (int rep = 0; rep < 6; ++rep) {
        const RobustMdpInstance inst = gen.finite_instance(QVariant::DiracOnly, true);
        indvec actions(static_cast<std::size_t>(inst.n_states), 0);
        for (auto& a : actions) a = static_cast<long>(gen.uniform_index(inst.n_actions));
        indvec kernels(static_cast<std::size_t>(inst.n_states), 0);
        for (std::size_t s = 0; s < kernels.size(); ++s)
            kernels[s] = static_cast<long>(
                gen.uniform_index(static_cast<long>(inst.ambiguity[s].kernels.size())));

        const StationaryControllerPolicy delta = dirac_policy(inst, actions);
        const StationaryAdversaryPolicy adv = kernel_policy(inst, kernels);
        const auto [rows, rewards] = induced_chain(inst, delta, adv);
        // Full-support rows: the chain is irreducible, so the gain is flat.
        const prec_t exact = exact_chain_gain(rows, rewards)[0];

        numvec mu(static_cast<std::size_t>(inst.n_states),
                  1.0 / static_cast<prec_t>(inst.n_states));
        const RunStats stats =
            run(inst, mu, stationary_ctrl(delta), stationary_adv(adv), 40000, 6,
                static_cast<std::uint64_t>(rep) + 1);
        if (std::fabs(stats.mean - exact) <= 3.0 * stats.std_error) ++covered;
    }
    CHECK(covered >= 5); // one 3-sigma miss in six runs is already unlucky
}
