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

#include <string>
#include <utility>
#include <vector>

#include "robmdp/definitions.hpp"

namespace robmdp {

/// Which randomizations the controller may play in a single state.
enum class QVariant {
    DiracOnly,            ///< only point masses on actions
    FullSimplex,          ///< any distribution over actions
    FiniteDistributions,  ///< an explicit finite list of distributions
};

/// Controller decision set, shared across states.
struct ControllerSet {
    QVariant variant = QVariant::DiracOnly;
    /// Rows over actions; populated iff variant == FiniteDistributions.
    std::vector<numvec> distributions;
};

/// Which ambiguity the adversary holds in one state.
enum class PVariant {
    FiniteKernels, ///< finite list of transition-kernel slices
    SaTvBalls,     ///< per-action total-variation ball around a nominal row
};

/// Per-state adversary ambiguity set. The adversary picks one element per
/// state (state-rectangular): a whole kernel slice for FiniteKernels, or one
/// row per action within the TV ball for SaTvBalls.
struct StateAmbiguity {
    PVariant variant = PVariant::FiniteKernels;
    /// kernels[k][a] is a probability row over next states (FiniteKernels).
    std::vector<std::vector<numvec>> kernels;
    /// nominal[a] is a probability row over next states (SaTvBalls).
    std::vector<numvec> nominal;
    /// radius[a] is the TV radius (half L1) for action a (SaTvBalls).
    numvec radius;
};

/// A robust MDP instance: rewards in [0,1], one controller decision set and
/// one per-state ambiguity set.
struct RobustMdpInstance {
    long n_states = 0;
    long n_actions = 0;
    /// reward[s][a] in [0,1].
    std::vector<numvec> reward;
    ControllerSet controller_set;
    std::vector<StateAmbiguity> ambiguity;
    /// Optional display names; empty when absent.
    std::vector<std::string> state_labels;
    std::vector<std::string> action_labels;
};

/// Stationary randomized controller policy: one distribution over actions per
/// state. Rows of DiracOnly instances are one-hot.
struct StationaryControllerPolicy {
    /// rows[s] is a distribution over actions.
    std::vector<numvec> rows;
};

/// Stationary adversary policy: one ambiguity-set element per state.
struct StationaryAdversaryPolicy {
    struct StateChoice {
        /// Index into the kernel list; -1 when the rows were picked from a TV
        /// ball (or constructed explicitly).
        long kernel_index = -1;
        /// rows[a] is the chosen probability row for action a.
        std::vector<numvec> rows;
    };
    std::vector<StateChoice> choices;
};

/// Parse and validate an instance from a JSON file.
///
/// @throws ParseError on malformed JSON or missing fields
/// @throws ValidationError when a field violates its contract; the message
///         names the offending field and index
RobustMdpInstance load_instance(const std::string& path);

/// Parse and validate an instance from a JSON string.
RobustMdpInstance parse_instance(const std::string& text);

/// Serialize an instance in the canonical field order. Loading the result
/// reproduces the instance bit-for-bit (shortest round-trip doubles).
std::string dump_instance(const RobustMdpInstance& inst);

/// Write dump_instance() output to a file.
void save_instance(const RobustMdpInstance& inst, const std::string& path);

/// Check that row has the expected length, no negative entries, and sums to
/// one within 1e-12 (no silent renormalization). field names the offender in
/// the error message.
void check_probability_row(const numvec& row, long expected_len, const std::string& field);

/// Validate shapes, row sums (1e-12 tolerance; no silent renormalization),
/// reward range [0,1], radii, and distribution lists.
///
/// @throws ValidationError naming the offending field and index
void validate_instance(const RobustMdpInstance& inst);

/// Validate a controller policy against the instance's decision set.
void validate_controller_policy(const RobustMdpInstance& inst, const StationaryControllerPolicy& pol);

/// Validate an adversary policy: kernel indices in range, or explicit rows
/// that are probability rows inside the state's ambiguity set (1e-12 slack).
void validate_adversary_policy(const RobustMdpInstance& inst, const StationaryAdversaryPolicy& pol);

/// One-hot controller policy from an action index per state.
StationaryControllerPolicy dirac_policy(const RobustMdpInstance& inst, const indvec& actions);

/// Adversary policy that plays the kernel with the given index in each state.
/// Valid for FiniteKernels states; for SaTvBalls states index 0 means the
/// nominal rows.
StationaryAdversaryPolicy kernel_policy(const RobustMdpInstance& inst, const indvec& kernel_indices);

/// Markov chain induced by a (controller, adversary) policy pair: transition
/// rows P(s'|s) and the mixed reward vector r(s).
std::pair<std::vector<numvec>, numvec> induced_chain(const RobustMdpInstance& inst,
                                                     const StationaryControllerPolicy& ctrl,
                                                     const StationaryAdversaryPolicy& adv);

/// Number of enumerable controller choices per state: n_actions for
/// DiracOnly, list size for FiniteDistributions.
///
/// @throws UnsupportedCombination for FullSimplex (not enumerable)
long controller_choice_count(const RobustMdpInstance& inst);

/// The enumerable controller choices as distributions over actions.
std::vector<numvec> controller_choices(const RobustMdpInstance& inst);

} // namespace robmdp
