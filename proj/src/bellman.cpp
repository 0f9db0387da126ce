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

#include "robmdp/bellman.hpp"

#include <cmath>

#include "robmdp/ambiguity.hpp"
#include "robmdp/errors.hpp"
#include "robmdp/linalg.hpp"

namespace robmdp {

namespace {

constexpr long STRATEGY_OUTER_CAP = 1000;
constexpr long STRATEGY_INNER_CAP = 1000;

bool choice_equal(const StationaryAdversaryPolicy::StateChoice& a,
                  const StationaryAdversaryPolicy::StateChoice& b) {
    if (a.kernel_index >= 0 && b.kernel_index >= 0) return a.kernel_index == b.kernel_index;
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        if (linf_dist(a.rows[i], b.rows[i]) != 0.0) return false;
    return true;
}

bool policy_equal(const StationaryControllerPolicy& a, const StationaryControllerPolicy& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        if (linf_dist(a.rows[i], b.rows[i]) != 0.0) return false;
    return true;
}

/// Solve (I - gamma P) u + beta 1 = r with the anchor u(0) = 0. The (u, beta)
/// system keeps O(1) conditioning for unichain pairs even as gamma -> 1,
/// unlike solving for v directly.
void eval_pair_anchored(const RobustMdpInstance& inst, const StationaryControllerPolicy& ctrl,
                        const StationaryAdversaryPolicy& adv, prec_t gamma, numvec& u, prec_t& beta) {
    const long n = inst.n_states;
    auto [p, r] = induced_chain(inst, ctrl, adv);
    Matrix a(n, n);
    for (long i = 0; i < n; ++i) {
        for (long j = 1; j < n; ++j)
            a.at(i, j - 1) = (i == j ? 1.0 : 0.0) - gamma * p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        a.at(i, n - 1) = 1.0;
    }
    const numvec x = solve_linear(a, r);
    u.assign(static_cast<std::size_t>(n), 0.0);
    for (long j = 1; j < n; ++j) u[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j - 1)];
    beta = x[static_cast<std::size_t>(n - 1)];
}

/// Adversary's exact best response to a fixed controller policy, given the
/// current relative values: the constant reward offset cancels, so only the
/// expected continuation <p_Delta(s), u> is minimized per state.
StationaryAdversaryPolicy greedy_adversary_vs_policy(const RobustMdpInstance& inst,
                                                     const StationaryControllerPolicy& ctrl,
                                                     const numvec& u) {
    StationaryAdversaryPolicy adv;
    adv.choices.reserve(static_cast<std::size_t>(inst.n_states));
    for (long s = 0; s < inst.n_states; ++s)
        adv.choices.push_back(
            worst_case_expectation(inst, s, ctrl.rows[static_cast<std::size_t>(s)], u).choice);
    return adv;
}

/// Controller's exact best response to fixed adversary rows (pure actions
/// suffice for FullSimplex: the objective is linear over the simplex).
StationaryControllerPolicy greedy_controller_vs_rows(const RobustMdpInstance& inst,
                                                     const StationaryAdversaryPolicy& adv,
                                                     const numvec& u, prec_t gamma) {
    std::vector<numvec> choices;
    if (inst.controller_set.variant == QVariant::FullSimplex) {
        for (long a = 0; a < inst.n_actions; ++a) {
            numvec phi(static_cast<std::size_t>(inst.n_actions), 0.0);
            phi[static_cast<std::size_t>(a)] = 1.0;
            choices.push_back(std::move(phi));
        }
    } else {
        choices = controller_choices(inst);
    }
    StationaryControllerPolicy ctrl;
    ctrl.rows.reserve(static_cast<std::size_t>(inst.n_states));
    for (long s = 0; s < inst.n_states; ++s) {
        prec_t best = -INFTY;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < choices.size(); ++i) {
            prec_t val = 0.0;
            for (long a = 0; a < inst.n_actions; ++a) {
                const prec_t pa = choices[i][static_cast<std::size_t>(a)];
                if (pa == 0.0) continue;
                val += pa * (inst.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] +
                             gamma * dot(adv.choices[static_cast<std::size_t>(s)].rows[static_cast<std::size_t>(a)], u));
            }
            if (val > best) {
                best = val;
                best_i = i;
            }
        }
        ctrl.rows.push_back(choices[best_i]);
    }
    return ctrl;
}

struct SweepResult {
    numvec values;              // game values in u-coordinates
    StationaryControllerPolicy greedy_ctrl;
    StationaryAdversaryPolicy greedy_adv;
    prec_t residual = 0.0;      // max_s |value(s) - u(s) - beta|
};

SweepResult greedy_sweep(const RobustMdpInstance& inst, const numvec& u, prec_t beta, prec_t gamma,
                         Orientation orientation, prec_t tol) {
    SweepResult out;
    out.values.resize(static_cast<std::size_t>(inst.n_states));
    for (long s = 0; s < inst.n_states; ++s) {
        StateGameSolution sol = solve_state_game(inst, s, u, 0.0, gamma, orientation, tol);
        out.values[static_cast<std::size_t>(s)] = sol.value;
        out.greedy_ctrl.rows.push_back(std::move(sol.controller_choice));
        out.greedy_adv.choices.push_back(std::move(sol.adversary_choice));
        out.residual = std::max(out.residual,
                                std::fabs(sol.value - u[static_cast<std::size_t>(s)] - beta));
    }
    return out;
}

RelativeValue strategy_iteration(const RobustMdpInstance& inst, prec_t gamma, Orientation orientation,
                                 prec_t target, const RelativeValue* warm) {
    RelativeValue rv;
    rv.gamma = gamma;
    rv.orientation = orientation;

    numvec u(static_cast<std::size_t>(inst.n_states), 0.0);
    prec_t beta = 0.0;

    StationaryControllerPolicy ctrl;
    StationaryAdversaryPolicy adv;
    if (warm != nullptr) {
        ctrl = warm->controller;
        adv = warm->adversary;
    } else {
        const SweepResult init = greedy_sweep(inst, u, beta, gamma, orientation, 1e-9);
        ctrl = init.greedy_ctrl;
        adv = init.greedy_adv;
    }

    for (long outer = 1; outer <= STRATEGY_OUTER_CAP; ++outer) {
        // Exact evaluation of the leader's current policy: the follower runs
        // policy iteration to its own best response.
        if (orientation == Orientation::SupInf) {
            for (long inner = 0; inner < STRATEGY_INNER_CAP; ++inner) {
                eval_pair_anchored(inst, ctrl, adv, gamma, u, beta);
                StationaryAdversaryPolicy next = greedy_adversary_vs_policy(inst, ctrl, u);
                bool same = true;
                for (long s = 0; s < inst.n_states && same; ++s)
                    same = choice_equal(adv.choices[static_cast<std::size_t>(s)],
                                        next.choices[static_cast<std::size_t>(s)]);
                if (same) break;
                adv = std::move(next);
            }
        } else {
            for (long inner = 0; inner < STRATEGY_INNER_CAP; ++inner) {
                eval_pair_anchored(inst, ctrl, adv, gamma, u, beta);
                StationaryControllerPolicy next = greedy_controller_vs_rows(inst, adv, u, gamma);
                if (policy_equal(ctrl, next)) break;
                ctrl = std::move(next);
            }
        }

        const SweepResult sweep = greedy_sweep(inst, u, beta, gamma, orientation, 1e-9);
        rv.iterations = outer;
        if (sweep.residual <= target) {
            rv.u = u;
            rv.beta = beta;
            rv.residual = sweep.residual;
            rv.controller = ctrl;
            rv.adversary = adv;
            return rv;
        }
        const bool leader_changed = orientation == Orientation::SupInf
                                        ? !policy_equal(ctrl, sweep.greedy_ctrl)
                                        : ![&] {
                                              bool same = true;
                                              for (long s = 0; s < inst.n_states && same; ++s)
                                                  same = choice_equal(
                                                      adv.choices[static_cast<std::size_t>(s)],
                                                      sweep.greedy_adv.choices[static_cast<std::size_t>(s)]);
                                              return same;
                                          }();
        if (!leader_changed)
            throw MaxItersExceeded("solve_discounted_relative: greedy policy is stable but the residual " +
                                       std::to_string(sweep.residual) + " is above the target " +
                                       std::to_string(target),
                                   sweep.residual);
        if (orientation == Orientation::SupInf)
            ctrl = sweep.greedy_ctrl;
        else
            adv = sweep.greedy_adv;
    }
    throw MaxItersExceeded("solve_discounted_relative: outer iteration cap reached", -1.0);
}

} // namespace

numvec apply_operator(const RobustMdpInstance& inst, const numvec& v, prec_t gamma,
                      Orientation orientation, prec_t tol) {
    numvec out(static_cast<std::size_t>(inst.n_states));
    for (long s = 0; s < inst.n_states; ++s)
        out[static_cast<std::size_t>(s)] = solve_state_game(inst, s, v, 0.0, gamma, orientation, tol).value;
    return out;
}

ValueFunction solve_discounted(const RobustMdpInstance& inst, prec_t gamma, Orientation orientation,
                               prec_t tol, long max_iters) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw ValidationError("solve_discounted: gamma = " + std::to_string(gamma) +
                              " outside (0,1)");
    ValueFunction vf;
    vf.gamma = gamma;
    vf.orientation = orientation;

    if (gamma > GAMMA_POLICY_ITER_THRESHOLD) {
        const RelativeValue rv = solve_discounted_relative(inst, gamma, orientation, tol);
        vf.values.resize(rv.u.size());
        for (std::size_t i = 0; i < rv.u.size(); ++i)
            vf.values[i] = rv.u[i] + rv.beta / (1.0 - gamma);
        vf.residual = rv.residual;
        vf.iterations = rv.iterations;
        return vf;
    }

    const prec_t target = tol * (1.0 - gamma) / (2.0 * gamma);
    numvec v(static_cast<std::size_t>(inst.n_states), 0.0);
    prec_t resid = INFTY;
    for (long it = 1; it <= max_iters; ++it) {
        numvec v2 = apply_operator(inst, v, gamma, orientation, tol);
        resid = linf_dist(v2, v);
        v = std::move(v2);
        if (resid <= target) {
            // Measure the residual at the returned iterate itself.
            const numvec v3 = apply_operator(inst, v, gamma, orientation, tol);
            vf.values = v;
            vf.residual = linf_dist(v3, v);
            vf.iterations = it;
            return vf;
        }
    }
    throw MaxItersExceeded("solve_discounted: no convergence after " + std::to_string(max_iters) +
                               " sweeps at gamma = " + std::to_string(gamma),
                           resid);
}

RelativeValue solve_discounted_relative(const RobustMdpInstance& inst, prec_t gamma,
                                        Orientation orientation, prec_t tol,
                                        const RelativeValue* warm_start) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw ValidationError("solve_discounted_relative: gamma = " + std::to_string(gamma) +
                              " outside (0,1)");
    const prec_t target = std::max(tol * (1.0 - gamma) / (2.0 * gamma), 1e-12);
    return strategy_iteration(inst, gamma, orientation, target, warm_start);
}

std::vector<SpanPoint> span_curve(const RobustMdpInstance& inst, const numvec& gamma_grid,
                                  Orientation orientation, prec_t tol) {
    if (gamma_grid.empty()) throw ValidationError("span_curve: empty discount grid");
    for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
        if (!(gamma_grid[i] > 0.0 && gamma_grid[i] < 1.0))
            throw ValidationError("span_curve: gamma_grid[" + std::to_string(i) + "] = " +
                                  std::to_string(gamma_grid[i]) + " outside (0,1)");
        if (i > 0 && gamma_grid[i] <= gamma_grid[i - 1])
            throw ValidationError("span_curve: gamma_grid must be strictly ascending");
    }
    std::vector<SpanPoint> out;
    out.reserve(gamma_grid.size());
    for (prec_t g : gamma_grid) {
        const ValueFunction vf = solve_discounted(inst, g, orientation, tol);
        SpanPoint pt;
        pt.gamma = g;
        pt.span_value = span(vf.values);
        pt.alpha_proxy = (1.0 - g) * vf.values[0];
        out.push_back(pt);
    }
    return out;
}

} // namespace robmdp
