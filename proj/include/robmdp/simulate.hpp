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

#include <cstdint>
#include <utility>
#include <vector>

#include "robmdp/gain.hpp"
#include "robmdp/model.hpp"
#include "robmdp/structure.hpp"

namespace robmdp {

/// Counter-based generator: the k-th output is a hash of (seed, stream, k),
/// so trajectories can use independent streams with no sequencing between
/// them and identical seeds reproduce runs bit-for-bit on any platform.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ (stream * 0xD1342543DE82EF95ULL))) {}

    std::uint64_t next() { return mix(key_ + (++ctr_) * 0x9E3779B97F4A7C15ULL); }

    /// Uniform double in [0, 1) with 53 random bits.
    prec_t uniform01() { return static_cast<prec_t>(next() >> 11) * 0x1.0p-53; }

    /// Sample an index from a probability row by cumulative inversion.
    /// Rounding at the top of the cumulative walk falls back to the last
    /// positive entry, never to a zero-probability index.
    long categorical(const numvec& probs);

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

enum class ControllerKind {
    Stationary,         ///< play `stationary` forever
    TwoPhaseController, ///< play `pre_target` until the chain hits `target`, then `stationary`
    ModelBasedLearner,  ///< certainty-equivalence learner over empirical kernels
};

enum class AdversaryKind {
    Stationary,
    TwoPhaseAdversary, ///< play `pre_target` until the chain hits `target`, then `stationary`
};

/// Knobs of the certainty-equivalence learner. The refit schedule itself is
/// fixed (doubling epochs: refit after steps 1, 2, 4, ...).
struct LearnerConfig {
    /// Exploration probability at step k is min(1, explore_scale / sqrt(k)).
    prec_t explore_scale = 10.0;
    /// Cap on the deterministic policies enumerated per refit.
    long policy_cap = POLICY_ENUM_CAP;
};

/// Controller to simulate. `stationary` is the policy of the Stationary
/// variant and the post-hit policy of the two-phase variant; `pre_target`
/// and `target` are read only by the two-phase variant. The learner needs
/// every Dirac action available in the instance's decision set and emits
/// only Dirac actions.
struct PolicySpec {
    ControllerKind kind = ControllerKind::Stationary;
    StationaryControllerPolicy stationary;
    StationaryControllerPolicy pre_target;
    long target = -1;
    LearnerConfig learner;
};

/// Adversary to simulate; fields mirror PolicySpec.
struct AdversarySpec {
    AdversaryKind kind = AdversaryKind::Stationary;
    StationaryAdversaryPolicy stationary;
    StationaryAdversaryPolicy pre_target;
    long target = -1;
};

/// One simulated transition, recorded only when a StepLog is supplied.
/// The phase flags say whether the main (post-hit) policy produced the
/// decision; they are always true for plain stationary specs and always
/// false for the learner.
struct StepRecord {
    long trajectory = 0;
    long k = 0; ///< 1-based step index; the step moves X_{k-1} to X_k
    long state = 0;
    long action = 0;
    long next = 0;
    bool used_phase2_ctrl = false;
    bool used_phase2_adv = false;
};

struct StepLog {
    std::vector<StepRecord> records;
};

/// Monte Carlo summary of a batch of trajectories.
struct RunStats {
    long n_steps = 0;
    long n_trajectories = 0;
    std::uint64_t seed = 0;
    /// Per-trajectory average reward (1/n) sum r(X_k, A_k).
    numvec trajectory_means;
    /// Mean of trajectory_means; in [0, 1] because rewards are.
    prec_t mean = 0.0;
    /// Sample standard deviation of trajectory_means over sqrt(T); 0 for T=1.
    prec_t std_error = 0.0;
    /// Running average at step k, averaged across trajectories, thinned to
    /// roughly 200 checkpoints with the final step always included.
    std::vector<std::pair<long, prec_t>> series;
    /// Max/min of the tail third of `series`. Proxies for the limit superior
    /// and inferior of the running average; reported separately from `mean`,
    /// never substituted for it.
    prec_t limsup_proxy = 0.0;
    prec_t liminf_proxy = 0.0;
    /// First k with X_k equal to the specs' target, -1 when never reached;
    /// empty when neither spec carries a target.
    indvec hitting_times;
};

/// Simulate n_trajectories runs of n_steps steps from initial distribution mu
/// under the given controller and adversary. Deterministic given the seed;
/// trajectory t draws from stream t regardless of scheduling. Pass a StepLog
/// to capture every transition (short horizons only).
///
/// @throws ValidationError on invalid mu, specs, or a learner over a decision
///         set missing some Dirac action
RunStats run(const RobustMdpInstance& inst, const numvec& mu, const PolicySpec& controller,
             const AdversarySpec& adversary, long n_steps, long n_trajectories, std::uint64_t seed,
             StepLog* log = nullptr);

/// Monte Carlo estimate of the first hitting time of y.
struct HittingEstimate {
    prec_t mean = 0.0;         ///< truncated-at-horizon times included
    prec_t ci_halfwidth = 0.0; ///< 1.96 * sample std / sqrt(n), normal approximation
    long n_trajectories = 0;
    bool horizon_exceeded = false; ///< some trajectory was truncated
};

HittingEstimate estimate_hitting_time(const RobustMdpInstance& inst, long start,
                                      const StationaryControllerPolicy& ctrl,
                                      const StationaryAdversaryPolicy& adv, long y,
                                      long n_trajectories, std::uint64_t seed,
                                      long horizon = 1000000);

/// Empirical check of a hitting certificate: from every start state, the mean
/// hitting time must respect bound = |S| / delta_prime and the probability of
/// hitting within |S| steps must respect delta_prime up to binomial noise.
struct CertificateCheck {
    prec_t max_mean = 0.0;         ///< worst start-state mean hitting time
    prec_t min_short_prob = 0.0;   ///< worst start-state P(tau <= |S|)
    prec_t sigma_short_prob = 0.0; ///< binomial std error at the worst start
    bool mean_within_bound = false;
    bool prob_within_bound = false;
};

CertificateCheck validate_certificate(const RobustMdpInstance& inst,
                                      const StationaryControllerPolicy& ctrl,
                                      const StationaryAdversaryPolicy& adv,
                                      const HittingCertificate& cert, long n_trajectories,
                                      std::uint64_t seed);

/// Demonstration that history-dependent control closes the sup-inf/inf-sup
/// gap: solves both orientations, then plays the learner against every
/// extreme stationary adversary and reports the worst long-run mean. On gap
/// instances the learner must clear the midpoint alpha* + gap/2 up to Monte
/// Carlo noise; instances with no gap pass degenerately.
struct GapDemoReport {
    DualityReport duality;
    CommClass adversary_comm = CommClass::Inconclusive;
    /// Learner long-run mean against each enumerated stationary adversary.
    numvec adversary_means;
    prec_t learner_min_mean = 0.0;
    prec_t se_at_min = 0.0;
    prec_t threshold = 0.0; ///< alpha_supinf + gap/2 - 3 * se_at_min
    bool pass = false;
};

/// @throws PreconditionFailed unless the adversary side is (weakly)
///         communicating per the structure checks
GapDemoReport hd_s_gap_demo(const RobustMdpInstance& inst, prec_t tol = 1e-6, long n_steps = 100000,
                            long n_trajectories = 8, std::uint64_t seed = 0);

} // namespace robmdp
