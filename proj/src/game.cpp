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

#include "robmdp/game.hpp"

#include <cmath>

#include "robmdp/errors.hpp"
#include "robmdp/simplex.hpp"

namespace robmdp {

namespace {

void check_game_args(const RobustMdpInstance& inst, long s, const numvec& w, prec_t gamma) {
    if (s < 0 || s >= inst.n_states)
        throw DimensionMismatch("state game: state " + std::to_string(s) + " out of range");
    if (static_cast<long>(w.size()) != inst.n_states)
        throw DimensionMismatch("state game: w length " + std::to_string(w.size()) +
                                " does not match n_states");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw ValidationError("state game: gamma = " + std::to_string(gamma) + " outside (0,1]");
}

/// Payoff of a pure/mixed controller choice against explicit adversary rows.
prec_t payoff_against_rows(const RobustMdpInstance& inst, long s, const numvec& phi,
                           const std::vector<numvec>& rows, const numvec& w, prec_t gain_shift,
                           prec_t gamma) {
    prec_t val = 0.0;
    for (long a = 0; a < inst.n_actions; ++a) {
        const prec_t pa = phi[static_cast<std::size_t>(a)];
        if (pa == 0.0) continue;
        val += pa * (inst.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] - gain_shift +
                     gamma * dot(rows[static_cast<std::size_t>(a)], w));
    }
    return val;
}

StateGameSolution supinf_enumerable(const RobustMdpInstance& inst, long s, const numvec& w,
                                    prec_t gain_shift, prec_t gamma) {
    const std::vector<numvec> choices = controller_choices(inst);
    StateGameSolution best;
    bool first = true;
    for (const numvec& phi : choices) {
        prec_t base = 0.0;
        for (long a = 0; a < inst.n_actions; ++a)
            base += phi[static_cast<std::size_t>(a)] *
                    (inst.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] - gain_shift);
        const ResponseResult resp = worst_case_expectation(inst, s, phi, w);
        const prec_t val = base + gamma * resp.value;
        if (first || val > best.value) {
            first = false;
            best.value = val;
            best.controller_choice = phi;
            best.adversary_choice = resp.choice;
        }
    }
    best.orientation = Orientation::SupInf;
    best.gap_bound = 0.0;
    return best;
}

StateGameSolution supinf_simplex_kernels(const RobustMdpInstance& inst, long s, const numvec& w,
                                         prec_t gain_shift, prec_t gamma, prec_t tol) {
    const StateAmbiguity& amb = inst.ambiguity[static_cast<std::size_t>(s)];
    const long nk = static_cast<long>(amb.kernels.size());
    std::vector<numvec> payoff(static_cast<std::size_t>(inst.n_actions),
                               numvec(static_cast<std::size_t>(nk), 0.0));
    for (long a = 0; a < inst.n_actions; ++a)
        for (long k = 0; k < nk; ++k)
            payoff[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)] =
                inst.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] - gain_shift +
                gamma * dot(amb.kernels[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)], w);

    const MatrixGameResult game = solve_matrix_game_maximin(payoff);
    if (game.lp_gap > std::max(tol, 1e-9))
        throw ToleranceNotMet("solve_supinf: LP gap " + std::to_string(game.lp_gap) +
                              " exceeds tolerance at state " + std::to_string(s));

    StateGameSolution sol;
    sol.value = game.value;
    sol.controller_choice = game.row_strategy;
    sol.adversary_choice.kernel_index = game.min_col;
    sol.adversary_choice.rows = amb.kernels[static_cast<std::size_t>(game.min_col)];
    sol.orientation = Orientation::SupInf;
    sol.gap_bound = game.lp_gap;
    return sol;
}

/// Best controller response to fixed adversary rows: enumerable choices, or
/// pure actions for FullSimplex (a linear objective over the simplex attains
/// its max at a vertex).
std::pair<prec_t, numvec> best_response(const RobustMdpInstance& inst, long s,
                                        const std::vector<numvec>& rows, const numvec& w,
                                        prec_t gain_shift, prec_t gamma) {
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
    prec_t best = -INFTY;
    long best_i = 0;
    for (std::size_t i = 0; i < choices.size(); ++i) {
        const prec_t val = payoff_against_rows(inst, s, choices[i], rows, w, gain_shift, gamma);
        if (val > best) {
            best = val;
            best_i = static_cast<long>(i);
        }
    }
    return {best, choices[static_cast<std::size_t>(best_i)]};
}

StateGameSolution infsup_kernels(const RobustMdpInstance& inst, long s, const numvec& w,
                                 prec_t gain_shift, prec_t gamma) {
    const StateAmbiguity& amb = inst.ambiguity[static_cast<std::size_t>(s)];
    StateGameSolution best;
    bool first = true;
    for (std::size_t k = 0; k < amb.kernels.size(); ++k) {
        auto [val, phi] = best_response(inst, s, amb.kernels[k], w, gain_shift, gamma);
        if (first || val < best.value) {
            first = false;
            best.value = val;
            best.controller_choice = std::move(phi);
            best.adversary_choice.kernel_index = static_cast<long>(k);
            best.adversary_choice.rows = amb.kernels[k];
        }
    }
    best.orientation = Orientation::InfSup;
    best.gap_bound = 0.0;
    return best;
}

StateGameSolution infsup_dirac_tv(const RobustMdpInstance& inst, long s, const numvec& w,
                                  prec_t gain_shift, prec_t gamma) {
    // Per-action rectangularity: the adversary's rows are chosen per action,
    // so inf and sup commute and the saddle is the worst row of each action
    // with the controller picking the best action afterwards.
    const StateAmbiguity& amb = inst.ambiguity[static_cast<std::size_t>(s)];
    StateGameSolution sol;
    sol.adversary_choice.kernel_index = -1;
    sol.adversary_choice.rows.resize(static_cast<std::size_t>(inst.n_actions));
    numvec action_values(static_cast<std::size_t>(inst.n_actions), 0.0);
    for (long a = 0; a < inst.n_actions; ++a) {
        numvec row = tv_extreme_row(amb.nominal[static_cast<std::size_t>(a)],
                                    amb.radius[static_cast<std::size_t>(a)], w, /*worst=*/true);
        action_values[static_cast<std::size_t>(a)] =
            inst.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] - gain_shift +
            gamma * dot(row, w);
        sol.adversary_choice.rows[static_cast<std::size_t>(a)] = std::move(row);
    }
    const long a_star = argmax_lowest(action_values);
    sol.value = action_values[static_cast<std::size_t>(a_star)];
    sol.controller_choice.assign(static_cast<std::size_t>(inst.n_actions), 0.0);
    sol.controller_choice[static_cast<std::size_t>(a_star)] = 1.0;
    sol.orientation = Orientation::InfSup;
    sol.gap_bound = 0.0;
    return sol;
}

StateGameSolution infsup_finite_tv(const RobustMdpInstance& inst, long s, const numvec& w,
                                   prec_t gain_shift, prec_t gamma, prec_t tol) {
    // Epigraph LP over the product of TV balls:
    //   min z  s.t.  z >= payoff(phi_i, p) for every listed phi_i, p in balls.
    // Variables: [z+, z-, p_{a,0..n-1}, e_{a,0..n-1} for each action a].
    const StateAmbiguity& amb = inst.ambiguity[static_cast<std::size_t>(s)];
    const std::vector<numvec>& choices = inst.controller_set.distributions;
    const long n = inst.n_states;
    const long na = inst.n_actions;
    const long nvar = 2 + 2 * na * n;
    const auto pvar = [&](long a, long t) { return 2 + a * 2 * n + t; };
    const auto evar = [&](long a, long t) { return 2 + a * 2 * n + n + t; };

    std::vector<numvec> rows;
    numvec b;
    std::vector<LpRel> rel;

    // z - sum_a phi(a) gamma <p_a, w> >= sum_a phi(a) (r - shift)
    for (const numvec& phi : choices) {
        numvec row(static_cast<std::size_t>(nvar), 0.0);
        row[0] = 1.0;
        row[1] = -1.0;
        prec_t rhs = 0.0;
        for (long a = 0; a < na; ++a) {
            const prec_t pa = phi[static_cast<std::size_t>(a)];
            if (pa == 0.0) continue;
            rhs += pa * (inst.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] - gain_shift);
            for (long t = 0; t < n; ++t)
                row[static_cast<std::size_t>(pvar(a, t))] -= pa * gamma * w[static_cast<std::size_t>(t)];
        }
        rows.push_back(std::move(row));
        b.push_back(rhs);
        rel.push_back(LpRel::GE);
    }
    for (long a = 0; a < na; ++a) {
        // probability row
        numvec sumrow(static_cast<std::size_t>(nvar), 0.0);
        for (long t = 0; t < n; ++t) sumrow[static_cast<std::size_t>(pvar(a, t))] = 1.0;
        rows.push_back(std::move(sumrow));
        b.push_back(1.0);
        rel.push_back(LpRel::EQ);
        // e >= |p - p0| via two one-sided constraints
        for (long t = 0; t < n; ++t) {
            const prec_t p0 = amb.nominal[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)];
            numvec r1(static_cast<std::size_t>(nvar), 0.0);
            r1[static_cast<std::size_t>(evar(a, t))] = 1.0;
            r1[static_cast<std::size_t>(pvar(a, t))] = 1.0;
            rows.push_back(std::move(r1));
            b.push_back(p0);
            rel.push_back(LpRel::GE);
            numvec r2(static_cast<std::size_t>(nvar), 0.0);
            r2[static_cast<std::size_t>(evar(a, t))] = 1.0;
            r2[static_cast<std::size_t>(pvar(a, t))] = -1.0;
            rows.push_back(std::move(r2));
            b.push_back(-p0);
            rel.push_back(LpRel::GE);
        }
        // L1 budget: sum_t e_{a,t} <= 2 theta_a
        numvec budget(static_cast<std::size_t>(nvar), 0.0);
        for (long t = 0; t < n; ++t) budget[static_cast<std::size_t>(evar(a, t))] = 1.0;
        rows.push_back(std::move(budget));
        b.push_back(2.0 * amb.radius[static_cast<std::size_t>(a)]);
        rel.push_back(LpRel::LE);
    }

    numvec c(static_cast<std::size_t>(nvar), 0.0);
    c[0] = 1.0;
    c[1] = -1.0;

    const LpResult lp = solve_lp_min(rows, b, rel, c);
    if (lp.status != LpStatus::Optimal)
        throw ToleranceNotMet("solve_infsup: epigraph LP not optimal at state " + std::to_string(s));

    StateGameSolution sol;
    sol.adversary_choice.kernel_index = -1;
    sol.adversary_choice.rows.assign(static_cast<std::size_t>(na),
                                     numvec(static_cast<std::size_t>(n), 0.0));
    for (long a = 0; a < na; ++a) {
        numvec& row = sol.adversary_choice.rows[static_cast<std::size_t>(a)];
        prec_t sum = 0.0;
        for (long t = 0; t < n; ++t) {
            prec_t v = lp.x[static_cast<std::size_t>(pvar(a, t))];
            if (v < 0.0) v = 0.0;
            row[static_cast<std::size_t>(t)] = v;
            sum += v;
        }
        for (long t = 0; t < n; ++t) row[static_cast<std::size_t>(t)] /= sum; // 1e-12 drift cleanup
    }

    // Re-evaluate so the reported value is what the extracted rows give.
    prec_t best = -INFTY;
    long best_i = 0;
    for (std::size_t i = 0; i < choices.size(); ++i) {
        const prec_t v =
            payoff_against_rows(inst, s, choices[i], sol.adversary_choice.rows, w, gain_shift, gamma);
        if (v > best) {
            best = v;
            best_i = static_cast<long>(i);
        }
    }
    sol.value = best;
    sol.controller_choice = choices[static_cast<std::size_t>(best_i)];
    sol.orientation = Orientation::InfSup;
    sol.gap_bound = std::fabs(lp.objective - best);
    if (sol.gap_bound > std::max(tol, 1e-7))
        throw ToleranceNotMet("solve_infsup: epigraph LP gap " + std::to_string(sol.gap_bound) +
                              " exceeds tolerance at state " + std::to_string(s));
    return sol;
}

} // namespace

StateGameSolution solve_supinf(const RobustMdpInstance& inst, long s, const numvec& w,
                               prec_t gain_shift, prec_t gamma, prec_t tol) {
    check_game_args(inst, s, w, gamma);
    const StateAmbiguity& amb = inst.ambiguity[static_cast<std::size_t>(s)];
    if (inst.controller_set.variant == QVariant::FullSimplex) {
        if (amb.variant == PVariant::SaTvBalls)
            throw UnsupportedCombination(
                "solve_supinf: full_simplex controller with sa_tv ambiguity is not supported");
        return supinf_simplex_kernels(inst, s, w, gain_shift, gamma, tol);
    }
    return supinf_enumerable(inst, s, w, gain_shift, gamma);
}

StateGameSolution solve_infsup(const RobustMdpInstance& inst, long s, const numvec& w,
                               prec_t gain_shift, prec_t gamma, prec_t tol) {
    check_game_args(inst, s, w, gamma);
    const StateAmbiguity& amb = inst.ambiguity[static_cast<std::size_t>(s)];
    if (amb.variant == PVariant::FiniteKernels) return infsup_kernels(inst, s, w, gain_shift, gamma);
    switch (inst.controller_set.variant) {
    case QVariant::DiracOnly: return infsup_dirac_tv(inst, s, w, gain_shift, gamma);
    case QVariant::FiniteDistributions: return infsup_finite_tv(inst, s, w, gain_shift, gamma, tol);
    case QVariant::FullSimplex:
        throw UnsupportedCombination(
            "solve_infsup: full_simplex controller with sa_tv ambiguity is not supported");
    }
    throw UnsupportedCombination("solve_infsup: unreachable variant");
}

StateGameSolution solve_state_game(const RobustMdpInstance& inst, long s, const numvec& w,
                                   prec_t gain_shift, prec_t gamma, Orientation orientation,
                                   prec_t tol) {
    return orientation == Orientation::SupInf ? solve_supinf(inst, s, w, gain_shift, gamma, tol)
                                              : solve_infsup(inst, s, w, gain_shift, gamma, tol);
}

} // namespace robmdp
