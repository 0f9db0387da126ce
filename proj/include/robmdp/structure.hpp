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

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robmdp/model.hpp"

namespace robmdp {

/// Classification of the communication structure on one side of the game.
/// Inconclusive is reported instead of a positive verdict whenever the
/// enumeration of extreme kernels provably covers the ambiguity set only
/// under the margin condition (see tv_margin_ok) and that condition fails.
enum class CommClass { Communicating, WeaklyCommunicating, No, Inconclusive };

std::string to_string(CommClass c);

enum class Side { Controller, Adversary };

using BoolMat = std::vector<std::vector<bool>>;

enum class GraphSide { ControllerFixed, AdversaryFixed, Union };

/// Directed support graph over states: edge s -> t iff some admissible
/// completion of the fixed side gives a positive one-step probability.
/// ControllerFixed requires delta, AdversaryFixed requires adv; Union needs
/// neither.
BoolMat reachability_graph(const RobustMdpInstance& inst, GraphSide side,
                           const StationaryControllerPolicy* delta = nullptr,
                           const StationaryAdversaryPolicy* adv = nullptr);

/// All-pairs reachability through paths of length >= 1.
BoolMat transitive_closure(const BoolMat& g);

/// True when the margin condition holds: every total-variation radius is
/// either zero or strictly below the smallest positive entry of its nominal
/// row. Under this condition no feasible kernel can remove support from a
/// nominal row, so closed sets of any feasible kernel are closed sets of the
/// nominal one and the extreme-kernel enumeration is exhaustive for the
/// universally quantified structure checks.
bool tv_margin_ok(const RobustMdpInstance& inst);

/// True when some state carries a total-variation ball of positive radius.
bool has_tv_ambiguity(const RobustMdpInstance& inst);

struct CommReport {
    CommClass verdict = CommClass::Inconclusive;
    std::vector<std::string> witnesses;  // offending policy and state pair, or per-policy classes
};

/// Classifies the controller side per the weak-communication definitions:
/// every support pattern of the controller set must induce either a strongly
/// connected existential reachability graph (Communicating) or a single
/// mutually reachable class of extreme-kernel-recurrent states with all other
/// states transient (WeaklyCommunicating).
CommReport check_controller_communication(const RobustMdpInstance& inst, long cap = POLICY_ENUM_CAP);

/// Mirror classification over the adversary's extreme kernel products.
CommReport check_adversary_communication(const RobustMdpInstance& inst, long cap = POLICY_ENUM_CAP);

struct BoolReport {
    std::optional<bool> value;           // nullopt = inconclusive
    std::vector<std::string> witnesses;
};

/// True iff every (support pattern, extreme kernel product) chain has exactly
/// one closed recurrent class. A false verdict always carries a feasible
/// witness; a true verdict is downgraded to inconclusive when the margin
/// condition fails.
BoolReport check_unichain(const RobustMdpInstance& inst, long cap = POLICY_ENUM_CAP);

/// Overlap-connectivity of the closed communicating classes collected over
/// the other side's extreme choices. With a positive-radius ball the false
/// verdict is inconclusive regardless of margin: an interior kernel can
/// always splice two disjoint classes into one larger class that bridges
/// them.
BoolReport check_occcc(const RobustMdpInstance& inst, Side side, long cap = POLICY_ENUM_CAP);

struct StructureReport {
    CommReport controller_comm;
    CommReport adversary_comm;
    BoolReport all_unichain;
    BoolReport occcc_controller;
    BoolReport occcc_adversary;
    std::vector<std::string> notes;
};

StructureReport analyze_structure(const RobustMdpInstance& inst, long cap = POLICY_ENUM_CAP);

/// Certificate attached to a built hitting policy: following the recorded
/// next-hop paths, every start reaches the target within |S| steps with
/// probability at least delta_prime, so the expected hitting time is at most
/// |S| / delta_prime.
struct HittingCertificate {
    long target = 0;
    prec_t delta_prime = 0.0;          // min over starts of the built path product
    prec_t bound = 0.0;                // |S| / delta_prime
    prec_t formula_delta_prime = 0.0;  // (min edge prob * |S|^-N)^|S|, the a priori value
    prec_t formula_bound = 0.0;
    std::vector<indvec> paths;         // per start, the state sequence down to the target
    prec_t empirical_mean = -1.0;      // mean hitting time from simulation, -1 until filled
};

/// Builds an adversary policy under which the fixed controller policy reaches
/// y from everywhere: states are assigned breadth-first along positive-
/// probability paths into the already-assigned set, lowest indices first.
/// Throws TargetUnreachable naming a state with no admissible path to y.
std::pair<StationaryAdversaryPolicy, HittingCertificate> build_adversary_to_target(
    const RobustMdpInstance& inst, const StationaryControllerPolicy& delta, long y);

/// Mirror construction: a controller policy reaching y under a fixed
/// adversary policy.
std::pair<StationaryControllerPolicy, HittingCertificate> build_controller_to_target(
    const RobustMdpInstance& inst, const StationaryAdversaryPolicy& adv, long y);

/// Expected steps to enter C from each state outside C under the fixed pair,
/// solving (I - M) x = 1 on the complement; entries on C are 0. Throws
/// SingularSystem when the complement contains a closed class.
numvec expected_exit_time(const RobustMdpInstance& inst, const StationaryControllerPolicy& delta,
                          const StationaryAdversaryPolicy& adv, const indvec& C);

} // namespace robmdp
