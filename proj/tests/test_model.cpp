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

#include <string>
#include <vector>

#include "robmdp/errors.hpp"
#include "robmdp/model.hpp"
#include "test_support.hpp"

using namespace robmdp;

TEST_CASE("fixture files parse with expected shapes and labels") {
    const RobustMdpInstance t1 = testing::load_fixture("t1_single");
    CHECK(t1.n_states == 1);
    CHECK(t1.n_actions == 1);
    CHECK(t1.reward[0][0] == 0.7);
    CHECK(t1.controller_set.variant == QVariant::DiracOnly);
    REQUIRE(t1.state_labels.size() == 1);
    CHECK(t1.state_labels[0] == "only");

    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    CHECK(d2.n_states == 2);
    CHECK(d2.n_actions == 2);
    REQUIRE(d2.ambiguity.size() == 2);
    CHECK(d2.ambiguity[0].variant == PVariant::FiniteKernels);
    CHECK(d2.ambiguity[0].kernels.size() == 2);
    CHECK(d2.ambiguity[0].kernels[0][0] == numvec{0.0, 1.0});

    const RobustMdpInstance tv = testing::load_fixture("sa_tv_demo");
    REQUIRE(tv.ambiguity.size() == 2);
    CHECK(tv.ambiguity[0].variant == PVariant::SaTvBalls);
    CHECK(tv.ambiguity[0].radius == numvec{0.05, 0.05});
    CHECK(tv.ambiguity[1].nominal[1] == numvec{0.5, 0.5});

    const RobustMdpInstance d4 = testing::load_fixture("d4_transient");
    CHECK(d4.controller_set.variant == QVariant::FiniteDistributions);
    REQUIRE(d4.controller_set.distributions.size() == 2);
    CHECK(d4.controller_set.distributions[1] == numvec{0.5, 0.5});
}

TEST_CASE("serialization round-trips byte for byte") {
    const std::vector<std::string> names = {"t1_single",      "d2_toggle", "mp_loop",
                                            "absorbing_pair", "d4_transient", "d6_overlap",
                                            "sa_tv_demo"};
    for (const std::string& name : names) {
        CAPTURE(name);
        const RobustMdpInstance inst = testing::load_fixture(name);
        const std::string once = dump_instance(inst);
        const RobustMdpInstance back = parse_instance(once);
        CHECK(dump_instance(back) == once);
        CHECK(back.n_states == inst.n_states);
        CHECK(back.reward == inst.reward);
    }
}

TEST_CASE("rows that fail to sum to one are rejected, not renormalized") {
    RobustMdpInstance inst = testing::load_fixture("t1_single");
    inst.ambiguity[0].kernels[0][0] = {0.9999999};
    CHECK_THROWS_AS(validate_instance(inst), ValidationError);
}

TEST_CASE("rewards outside the unit interval are rejected") {
    RobustMdpInstance inst = testing::load_fixture("d2_toggle");
    inst.reward[1][0] = 1.5;
    CHECK_THROWS_AS(validate_instance(inst), ValidationError);
    inst.reward[1][0] = -0.25;
    CHECK_THROWS_AS(validate_instance(inst), ValidationError);
}

TEST_CASE("malformed documents raise parse errors") {
    CHECK_THROWS_AS(parse_instance("{ not json"), ParseError);
    CHECK_THROWS_AS(parse_instance("{\"format\": 1}"), ParseError);
    CHECK_THROWS_AS(load_instance("/no/such/file.json"), ParseError);
    // Unknown variant names are contract violations.
    std::string text = dump_instance(testing::load_fixture("t1_single"));
    const std::string needle = "\"dirac_only\"";
    text.replace(text.find(needle), needle.size(), "\"mystery\"");
    CHECK_THROWS(parse_instance(text));
}

TEST_CASE("tv radii must be nonnegative and rows must match n_states") {
    RobustMdpInstance inst = testing::load_fixture("sa_tv_demo");
    inst.ambiguity[0].radius[0] = -0.01;
    CHECK_THROWS_AS(validate_instance(inst), ValidationError);
    inst = testing::load_fixture("sa_tv_demo");
    inst.ambiguity[1].nominal[0] = {0.2, 0.3, 0.5};
    CHECK_THROWS_AS(validate_instance(inst), ValidationError);
}

TEST_CASE("check_probability_row accepts uniform rows and rejects junk") {
    CHECK_NOTHROW(check_probability_row(numvec(7, 1.0 / 7.0), 7, "row"));
    CHECK_THROWS_AS(check_probability_row({0.5, 0.6}, 2, "row"), ValidationError);
    CHECK_THROWS_AS(check_probability_row({-0.1, 1.1}, 2, "row"), ValidationError);
    CHECK_THROWS_AS(check_probability_row({1.0}, 2, "row"), ValidationError);
}

TEST_CASE("dirac and kernel policies are built and validated") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    const StationaryControllerPolicy ctrl = dirac_policy(d2, {0, 1});
    CHECK(ctrl.rows[0] == numvec{1.0, 0.0});
    CHECK(ctrl.rows[1] == numvec{0.0, 1.0});
    CHECK_NOTHROW(validate_controller_policy(d2, ctrl));
    CHECK_THROWS_AS(dirac_policy(d2, {0, 5}), ValidationError);

    const StationaryAdversaryPolicy adv = kernel_policy(d2, {0, 0});
    CHECK(adv.choices[0].kernel_index == 0);
    CHECK(adv.choices[0].rows[0] == numvec{0.0, 1.0});
    CHECK_NOTHROW(validate_adversary_policy(d2, adv));
    CHECK_THROWS_AS(kernel_policy(d2, {0, 7}), ValidationError);
}

TEST_CASE("kernel_policy index zero means the nominal rows under tv ambiguity") {
    const RobustMdpInstance tv = testing::load_fixture("sa_tv_demo");
    const StationaryAdversaryPolicy adv = kernel_policy(tv, {0, 0});
    CHECK(adv.choices[0].rows[0] == tv.ambiguity[0].nominal[0]);
    CHECK_NOTHROW(validate_adversary_policy(tv, adv));
}

TEST_CASE("adversary rows outside the tv ball are rejected") {
    const RobustMdpInstance tv = testing::load_fixture("sa_tv_demo");
    StationaryAdversaryPolicy adv = kernel_policy(tv, {0, 0});
    // State 0 action 0 has nominal (0.9, 0.1) and radius 0.05: moving 0.2 of
    // mass leaves the ball.
    adv.choices[0].kernel_index = -1;
    adv.choices[0].rows[0] = {0.7, 0.3};
    CHECK_THROWS_AS(validate_adversary_policy(tv, adv), ValidationError);
    adv.choices[0].rows[0] = {0.87, 0.13};
    CHECK_NOTHROW(validate_adversary_policy(tv, adv));
}

TEST_CASE("controller policy rows must live in the decision set") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    StationaryControllerPolicy mixed;
    mixed.rows = {{0.5, 0.5}, {1.0, 0.0}};
    CHECK_THROWS_AS(validate_controller_policy(d2, mixed), ValidationError);

    const RobustMdpInstance d4 = testing::load_fixture("d4_transient");
    StationaryControllerPolicy listed;
    listed.rows = {{0.5, 0.5}, {1.0, 0.0}, {0.5, 0.5}};
    CHECK_NOTHROW(validate_controller_policy(d4, listed));
    listed.rows[0] = {0.25, 0.75};
    CHECK_THROWS_AS(validate_controller_policy(d4, listed), ValidationError);
}

TEST_CASE("induced_chain mixes kernel rows under the controller distribution") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    const auto [rows, rew] =
        induced_chain(d2, dirac_policy(d2, {0, 1}), kernel_policy(d2, {0, 0}));
    CHECK(rows[0] == numvec{0.0, 1.0});
    CHECK(rows[1] == numvec{0.0, 1.0});
    CHECK(rew == numvec{0.0, 1.0});

    const RobustMdpInstance d4 = testing::load_fixture("d4_transient");
    StationaryControllerPolicy mix;
    mix.rows = {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
    const auto [rows4, rew4] = induced_chain(d4, mix, kernel_policy(d4, {0, 0, 0}));
    CHECK(rows4[0][0] == doctest::Approx(0.25));
    CHECK(rows4[0][1] == doctest::Approx(0.75));
    CHECK(rew4[0] == doctest::Approx(0.25));
}

TEST_CASE("controller choice enumeration by decision-set variant") {
    const RobustMdpInstance d2 = testing::load_fixture("d2_toggle");
    CHECK(controller_choice_count(d2) == 2);
    const std::vector<numvec> dirac = controller_choices(d2);
    REQUIRE(dirac.size() == 2);
    CHECK(dirac[0] == numvec{1.0, 0.0});
    CHECK(dirac[1] == numvec{0.0, 1.0});

    const RobustMdpInstance d4 = testing::load_fixture("d4_transient");
    CHECK(controller_choice_count(d4) == 2);
    CHECK(controller_choices(d4)[1] == numvec{0.5, 0.5});

    RobustMdpInstance simplex = d2;
    simplex.controller_set.variant = QVariant::FullSimplex;
    CHECK_THROWS_AS(controller_choices(simplex), UnsupportedCombination);
}

TEST_CASE("random generated instances validate") {
    testing::InstanceGen gen(7);
    for (int rep = 0; rep < 20; ++rep) {
        const RobustMdpInstance a = gen.finite_instance(QVariant::DiracOnly, false);
        CHECK_NOTHROW(validate_instance(a));
        const RobustMdpInstance b = gen.tv_instance(QVariant::DiracOnly, true);
        CHECK_NOTHROW(validate_instance(b));
    }
}
