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

#include "robmdp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robmdp/enumerate.hpp"
#include "robmdp/errors.hpp"
#include "robmdp/oracle.hpp"

namespace robmdp {

long CounterRng::categorical(const numvec& probs) {
    const prec_t u = uniform01();
    prec_t cum = 0.0;
    long last_pos = -1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        last_pos = static_cast<long>(i);
        cum += probs[i];
        if (u < cum) return last_pos;
    }
    // Cumulative sum fell short of u by rounding; the row itself sums to 1.
    if (last_pos < 0) throw ValidationError("categorical: no positive mass in probability row");
    return last_pos;
}

namespace {

void check_target(long target, long n_states, const std::string& who) {
    if (target < 0 || target >= n_states)
        throw ValidationError(who + ": target state " + std::to_string(target) + " out of range [0, " +
                              std::to_string(n_states) + ")");
}

/// The learner plays Dirac actions only, so every unit row must belong to
/// the controller decision set.
void require_dirac_actions(const RobustMdpInstance& inst) {
    if (inst.controller_set.variant != QVariant::FiniteDistributions) return;
    for (long a = 0; a < inst.n_actions; ++a) {
        bool found = false;
        for (const numvec& d : inst.controller_set.distributions) {
            bool unit = true;
            for (long b = 0; b < inst.n_actions && unit; ++b)
                unit = d[static_cast<std::size_t>(b)] == (b == a ? 1.0 : 0.0);
            if (unit) {
                found = true;
                break;
            }
        }
        if (!found)
            throw ValidationError("model-based learner: decision set has no Dirac row for action " +
                                  std::to_string(a));
    }
}

void validate_controller_spec(const RobustMdpInstance& inst, const PolicySpec& spec) {
    switch (spec.kind) {
    case ControllerKind::Stationary: validate_controller_policy(inst, spec.stationary); break;
    case ControllerKind::TwoPhaseController:
        validate_controller_policy(inst, spec.stationary);
        validate_controller_policy(inst, spec.pre_target);
        check_target(spec.target, inst.n_states, "two-phase controller");
        break;
    case ControllerKind::ModelBasedLearner:
        require_dirac_actions(inst);
        if (spec.learner.policy_cap < 1) throw ValidationError("model-based learner: policy_cap must be >= 1");
        break;
    }
    if (spec.kind != ControllerKind::TwoPhaseController && spec.target >= 0)
        check_target(spec.target, inst.n_states, "controller spec");
}

void validate_adversary_spec(const RobustMdpInstance& inst, const AdversarySpec& spec) {
    validate_adversary_policy(inst, spec.stationary);
    if (spec.kind == AdversaryKind::TwoPhaseAdversary) {
        validate_adversary_policy(inst, spec.pre_target);
        check_target(spec.target, inst.n_states, "two-phase adversary");
    } else if (spec.target >= 0) {
        check_target(spec.target, inst.n_states, "adversary spec");
    }
}

/// Transition counts of one trajectory plus the policy the learner currently
/// trusts. Refit from scratch at every call; counts are tiny.
struct LearnerState {
    std::vector<std::vector<numvec>> counts; // counts[s][a][t]
    std::vector<std::vector<long>> visits;   // visits[s][a]
    indvec greedy;                           // action per state

    LearnerState(long n, long m)
        : counts(static_cast<std::size_t>(n),
                 std::vector<numvec>(static_cast<std::size_t>(m), numvec(static_cast<std::size_t>(n), 0.0))),
          visits(static_cast<std::size_t>(n), std::vector<long>(static_cast<std::size_t>(m), 0)),
          greedy(static_cast<std::size_t>(n), 0) {}
};

/// Certainty-equivalence refit: empirical rows (uniform where unvisited) with
/// the true rewards, scored by exact average gain. Ranks by gain at the
/// current state, then mean gain, then lowest policy index.
void refit_learner(const RobustMdpInstance& inst, LearnerState& ls, long current,
                   const LearnerConfig& cfg) {
    const long n = inst.n_states;
    const long m = inst.n_actions;

    std::vector<std::vector<numvec>> emp(static_cast<std::size_t>(n),
                                         std::vector<numvec>(static_cast<std::size_t>(m)));
    for (long s = 0; s < n; ++s)
        for (long a = 0; a < m; ++a) {
            const long v = ls.visits[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
            numvec row(static_cast<std::size_t>(n), 0.0);
            if (v == 0) {
                std::fill(row.begin(), row.end(), 1.0 / static_cast<prec_t>(n));
            } else {
                const numvec& c = ls.counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
                for (long t = 0; t < n; ++t)
                    row[static_cast<std::size_t>(t)] = c[static_cast<std::size_t>(t)] / static_cast<prec_t>(v);
            }
            emp[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = std::move(row);
        }

    long count = 1;
    for (long s = 0; s < n; ++s) {
        count *= m;
        if (count > cfg.policy_cap)
            throw EnumerationCapExceeded("model-based learner: " + std::to_string(m) + "^" +
                                         std::to_string(n) + " deterministic policies exceed cap " +
                                         std::to_string(cfg.policy_cap));
    }

    indvec pol(static_cast<std::size_t>(n), 0);
    const indvec radix(static_cast<std::size_t>(n), m);
    std::vector<numvec> rows(static_cast<std::size_t>(n));
    numvec rew(static_cast<std::size_t>(n), 0.0);
    bool first = true;
    prec_t best_at = 0.0, best_mean = 0.0;
    indvec best_pol = pol;
    do {
        for (long s = 0; s < n; ++s) {
            rows[static_cast<std::size_t>(s)] =
                emp[static_cast<std::size_t>(s)][static_cast<std::size_t>(pol[static_cast<std::size_t>(s)])];
            rew[static_cast<std::size_t>(s)] =
                inst.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(pol[static_cast<std::size_t>(s)])];
        }
        const numvec g = exact_chain_gain(rows, rew);
        const prec_t at = g[static_cast<std::size_t>(current)];
        prec_t mean = 0.0;
        for (prec_t v : g) mean += v;
        mean /= static_cast<prec_t>(n);
        if (first || at > best_at || (at == best_at && mean > best_mean)) {
            first = false;
            best_at = at;
            best_mean = mean;
            best_pol = pol;
        }
    } while (next_odometer(pol, radix));
    ls.greedy = best_pol;
}

/// Simulate one hitting time of y under a stationary pair, truncating at
/// horizon. Counts steps, so start == y gives 0 without a single draw.
long simulate_tau(CounterRng& rng, long start, const StationaryControllerPolicy& ctrl,
                  const StationaryAdversaryPolicy& adv, long y, long horizon, bool& truncated) {
    long s = start;
    long tau = 0;
    while (s != y && tau < horizon) {
        const long a = rng.categorical(ctrl.rows[static_cast<std::size_t>(s)]);
        s = rng.categorical(adv.choices[static_cast<std::size_t>(s)].rows[static_cast<std::size_t>(a)]);
        ++tau;
    }
    if (s != y) truncated = true;
    return tau;
}

} // namespace

RunStats run(const RobustMdpInstance& inst, const numvec& mu, const PolicySpec& controller,
             const AdversarySpec& adversary, long n_steps, long n_trajectories, std::uint64_t seed,
             StepLog* log) {
    if (n_steps < 1) throw ValidationError("run: n_steps must be >= 1");
    if (n_trajectories < 1) throw ValidationError("run: n_trajectories must be >= 1");
    check_probability_row(mu, inst.n_states, "mu");
    validate_controller_spec(inst, controller);
    validate_adversary_spec(inst, adversary);

    const long m = inst.n_actions;
    const bool learning = controller.kind == ControllerKind::ModelBasedLearner;
    const long stat_target = controller.target >= 0 ? controller.target : adversary.target;

    // Checkpoints of the running average, shared across trajectories.
    const long stride = std::max(1L, n_steps / 200);
    std::vector<long> checks;
    for (long k = stride; k <= n_steps; k += stride) checks.push_back(k);
    if (checks.back() != n_steps) checks.push_back(n_steps);
    numvec check_sums(checks.size(), 0.0);

    RunStats stats;
    stats.n_steps = n_steps;
    stats.n_trajectories = n_trajectories;
    stats.seed = seed;
    stats.trajectory_means.resize(static_cast<std::size_t>(n_trajectories), 0.0);

    for (long t = 0; t < n_trajectories; ++t) {
        CounterRng rng(seed, static_cast<std::uint64_t>(t));
        long s = rng.categorical(mu);

        bool ctrl_hit = controller.target >= 0 && s == controller.target;
        bool adv_hit = adversary.target >= 0 && s == adversary.target;
        long hit_at = (stat_target >= 0 && s == stat_target) ? 0 : -1;

        LearnerState ls(inst.n_states, m);
        if (learning) refit_learner(inst, ls, s, controller.learner);

        KahanSum rsum;
        std::size_t ci = 0;
        for (long k = 1; k <= n_steps; ++k) {
            long a = 0;
            bool ctrl_phase2 = true;
            switch (controller.kind) {
            case ControllerKind::Stationary:
                a = rng.categorical(controller.stationary.rows[static_cast<std::size_t>(s)]);
                break;
            case ControllerKind::TwoPhaseController:
                ctrl_phase2 = ctrl_hit;
                a = rng.categorical(
                    (ctrl_hit ? controller.stationary : controller.pre_target).rows[static_cast<std::size_t>(s)]);
                break;
            case ControllerKind::ModelBasedLearner: {
                ctrl_phase2 = false;
                const prec_t eps =
                    std::min(1.0, controller.learner.explore_scale / std::sqrt(static_cast<prec_t>(k)));
                if (rng.uniform01() < eps) {
                    a = static_cast<long>(rng.uniform01() * static_cast<prec_t>(m));
                    if (a >= m) a = m - 1;
                } else {
                    a = ls.greedy[static_cast<std::size_t>(s)];
                }
                break;
            }
            }

            const bool adv_phase2 = adversary.kind == AdversaryKind::Stationary || adv_hit;
            const StationaryAdversaryPolicy& apol = adv_phase2 ? adversary.stationary : adversary.pre_target;
            const long nx =
                rng.categorical(apol.choices[static_cast<std::size_t>(s)].rows[static_cast<std::size_t>(a)]);

            rsum.add(inst.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]);
            if (log) log->records.push_back({t, k, s, a, nx, ctrl_phase2, adv_phase2});
            if (learning) {
                ls.visits[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] += 1;
                ls.counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)][static_cast<std::size_t>(nx)] +=
                    1.0;
            }

            s = nx;
            if (controller.target >= 0 && s == controller.target) ctrl_hit = true;
            if (adversary.target >= 0 && s == adversary.target) adv_hit = true;
            if (hit_at < 0 && stat_target >= 0 && s == stat_target) hit_at = k;

            // Doubling epochs: refit on data up to step 2^j, play through 2^(j+1).
            if (learning && (k & (k - 1)) == 0) refit_learner(inst, ls, s, controller.learner);

            if (ci < checks.size() && k == checks[ci]) {
                check_sums[ci] += rsum.value() / static_cast<prec_t>(k);
                ++ci;
            }
        }

        stats.trajectory_means[static_cast<std::size_t>(t)] = rsum.value() / static_cast<prec_t>(n_steps);
        if (stat_target >= 0) stats.hitting_times.push_back(hit_at);
    }

    KahanSum mean_sum;
    for (prec_t v : stats.trajectory_means) mean_sum.add(v);
    stats.mean = mean_sum.value() / static_cast<prec_t>(n_trajectories);
    if (n_trajectories > 1) {
        prec_t ss = 0.0;
        for (prec_t v : stats.trajectory_means) ss += (v - stats.mean) * (v - stats.mean);
        stats.std_error = std::sqrt(ss / static_cast<prec_t>(n_trajectories - 1)) /
                          std::sqrt(static_cast<prec_t>(n_trajectories));
    }

    stats.series.reserve(checks.size());
    for (std::size_t i = 0; i < checks.size(); ++i)
        stats.series.emplace_back(checks[i], check_sums[i] / static_cast<prec_t>(n_trajectories));
    const std::size_t tail = stats.series.size() - std::max<std::size_t>(1, stats.series.size() / 3);
    stats.limsup_proxy = stats.series[tail].second;
    stats.liminf_proxy = stats.series[tail].second;
    for (std::size_t i = tail; i < stats.series.size(); ++i) {
        stats.limsup_proxy = std::max(stats.limsup_proxy, stats.series[i].second);
        stats.liminf_proxy = std::min(stats.liminf_proxy, stats.series[i].second);
    }
    return stats;
}

HittingEstimate estimate_hitting_time(const RobustMdpInstance& inst, long start,
                                      const StationaryControllerPolicy& ctrl,
                                      const StationaryAdversaryPolicy& adv, long y,
                                      long n_trajectories, std::uint64_t seed, long horizon) {
    if (n_trajectories < 1) throw ValidationError("estimate_hitting_time: n_trajectories must be >= 1");
    if (horizon < 1) throw ValidationError("estimate_hitting_time: horizon must be >= 1");
    check_target(start, inst.n_states, "estimate_hitting_time start");
    check_target(y, inst.n_states, "estimate_hitting_time");
    validate_controller_policy(inst, ctrl);
    validate_adversary_policy(inst, adv);

    HittingEstimate est;
    est.n_trajectories = n_trajectories;
    numvec taus(static_cast<std::size_t>(n_trajectories), 0.0);
    for (long t = 0; t < n_trajectories; ++t) {
        CounterRng rng(seed, static_cast<std::uint64_t>(t));
        bool truncated = false;
        taus[static_cast<std::size_t>(t)] =
            static_cast<prec_t>(simulate_tau(rng, start, ctrl, adv, y, horizon, truncated));
        if (truncated) est.horizon_exceeded = true;
    }
    KahanSum sum;
    for (prec_t v : taus) sum.add(v);
    est.mean = sum.value() / static_cast<prec_t>(n_trajectories);
    if (n_trajectories > 1) {
        prec_t ss = 0.0;
        for (prec_t v : taus) ss += (v - est.mean) * (v - est.mean);
        est.ci_halfwidth = 1.96 * std::sqrt(ss / static_cast<prec_t>(n_trajectories - 1)) /
                           std::sqrt(static_cast<prec_t>(n_trajectories));
    }
    return est;
}

CertificateCheck validate_certificate(const RobustMdpInstance& inst,
                                      const StationaryControllerPolicy& ctrl,
                                      const StationaryAdversaryPolicy& adv,
                                      const HittingCertificate& cert, long n_trajectories,
                                      std::uint64_t seed) {
    if (n_trajectories < 1) throw ValidationError("validate_certificate: n_trajectories must be >= 1");
    validate_controller_policy(inst, ctrl);
    validate_adversary_policy(inst, adv);
    check_target(cert.target, inst.n_states, "validate_certificate");

    const long n = inst.n_states;
    const long horizon = 1000000;
    CertificateCheck check;
    check.min_short_prob = 1.0;
    for (long s0 = 0; s0 < n; ++s0) {
        KahanSum sum;
        long short_hits = 0;
        for (long t = 0; t < n_trajectories; ++t) {
            CounterRng rng(seed, static_cast<std::uint64_t>(s0) * static_cast<std::uint64_t>(n_trajectories) +
                                     static_cast<std::uint64_t>(t));
            bool truncated = false;
            const long tau = simulate_tau(rng, s0, ctrl, adv, cert.target, horizon, truncated);
            sum.add(static_cast<prec_t>(tau));
            if (tau <= n) ++short_hits;
        }
        const prec_t mean = sum.value() / static_cast<prec_t>(n_trajectories);
        const prec_t p = static_cast<prec_t>(short_hits) / static_cast<prec_t>(n_trajectories);
        check.max_mean = std::max(check.max_mean, mean);
        if (p < check.min_short_prob) {
            check.min_short_prob = p;
            check.sigma_short_prob = std::sqrt(p * (1.0 - p) / static_cast<prec_t>(n_trajectories));
        }
    }
    check.mean_within_bound = check.max_mean <= cert.bound;
    check.prob_within_bound = check.min_short_prob >= cert.delta_prime - 3.0 * check.sigma_short_prob;
    return check;
}

GapDemoReport hd_s_gap_demo(const RobustMdpInstance& inst, prec_t tol, long n_steps,
                            long n_trajectories, std::uint64_t seed) {
    GapDemoReport rep;
    const CommReport comm = check_adversary_communication(inst);
    rep.adversary_comm = comm.verdict;
    if (comm.verdict != CommClass::Communicating && comm.verdict != CommClass::WeaklyCommunicating)
        throw PreconditionFailed("gap demo needs a (weakly) communicating adversary; structure check says " +
                                 to_string(comm.verdict));

    rep.duality = duality_report(inst, tol);

    PolicySpec learner;
    learner.kind = ControllerKind::ModelBasedLearner;
    numvec mu(static_cast<std::size_t>(inst.n_states), 0.0);
    mu[0] = 1.0;

    const std::vector<StationaryAdversaryPolicy> advs = adversary_extreme_products(inst);
    for (std::size_t i = 0; i < advs.size(); ++i) {
        AdversarySpec spec;
        spec.stationary = advs[i];
        const RunStats stats =
            run(inst, mu, learner, spec, n_steps, n_trajectories, seed + static_cast<std::uint64_t>(i));
        rep.adversary_means.push_back(stats.mean);
        if (i == 0 || stats.mean < rep.learner_min_mean) {
            rep.learner_min_mean = stats.mean;
            rep.se_at_min = stats.std_error;
        }
    }

    rep.threshold = rep.duality.alpha_supinf + 0.5 * rep.duality.gap - 3.0 * rep.se_at_min;
    rep.pass = std::fabs(rep.duality.gap) <= tol || rep.learner_min_mean >= rep.threshold;
    return rep;
}

} // namespace robmdp
