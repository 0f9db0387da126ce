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

#include "robmdp/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robmdp/errors.hpp"

namespace robmdp {

numvec tv_extreme_row(const numvec& p0, prec_t theta, const numvec& w, bool worst) {
    const std::size_t n = p0.size();
    numvec row = p0;
    if (theta <= 0.0 || n <= 1) return row;

    // Receiver: extremal-w state, lowest index on ties.
    std::size_t receiver = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const bool better = worst ? (w[i] < w[receiver]) : (w[i] > w[receiver]);
        if (better) receiver = i;
    }

    // Donors ordered by decreasing benefit, lowest index on ties.
    std::vector<std::size_t> donors;
    donors.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        if (i != receiver) donors.push_back(i);
    std::stable_sort(donors.begin(), donors.end(), [&](std::size_t a, std::size_t b) {
        return worst ? (w[a] > w[b]) : (w[a] < w[b]);
    });

    prec_t budget = theta;
    for (std::size_t d : donors) {
        if (budget <= 0.0) break;
        // Moving mass between equal-w states changes nothing; stop there.
        if (worst ? (w[d] <= w[receiver]) : (w[d] >= w[receiver])) break;
        const prec_t take = std::min(budget, row[d]);
        if (take <= 0.0) continue;
        row[d] -= take;
        row[receiver] += take;
        budget -= take;
    }
    return row;
}

namespace {

ResponseResult optimize_expectation(const RobustMdpInstance& inst, long s, const numvec& phi,
                                    const numvec& w, bool worst) {
    if (static_cast<long>(phi.size()) != inst.n_actions)
        throw DimensionMismatch("expectation: phi length " + std::to_string(phi.size()) +
                                " does not match n_actions");
    if (static_cast<long>(w.size()) != inst.n_states)
        throw DimensionMismatch("expectation: w length " + std::to_string(w.size()) +
                                " does not match n_states");
    const StateAmbiguity& amb = inst.ambiguity[static_cast<std::size_t>(s)];
    ResponseResult res;

    if (amb.variant == PVariant::FiniteKernels) {
        long best = -1;
        prec_t bestval = 0.0;
        for (std::size_t k = 0; k < amb.kernels.size(); ++k) {
            prec_t val = 0.0;
            for (long a = 0; a < inst.n_actions; ++a) {
                const prec_t pa = phi[static_cast<std::size_t>(a)];
                if (pa == 0.0) continue;
                val += pa * dot(amb.kernels[k][static_cast<std::size_t>(a)], w);
            }
            if (best < 0 || (worst ? val < bestval : val > bestval)) {
                best = static_cast<long>(k);
                bestval = val;
            }
        }
        res.value = bestval;
        res.choice.kernel_index = best;
        res.choice.rows = amb.kernels[static_cast<std::size_t>(best)];
    } else {
        // Per-action separability of the SA-rectangular ball product.
        res.choice.kernel_index = -1;
        res.choice.rows.resize(static_cast<std::size_t>(inst.n_actions));
        prec_t val = 0.0;
        for (long a = 0; a < inst.n_actions; ++a) {
            const numvec& p0 = amb.nominal[static_cast<std::size_t>(a)];
            const prec_t theta = amb.radius[static_cast<std::size_t>(a)];
            const prec_t pa = phi[static_cast<std::size_t>(a)];
            if (pa == 0.0) {
                // Unplayed action: report the nominal row as the canonical choice.
                res.choice.rows[static_cast<std::size_t>(a)] = p0;
                continue;
            }
            numvec row = tv_extreme_row(p0, theta, w, worst);
            val += pa * dot(row, w);
            res.choice.rows[static_cast<std::size_t>(a)] = std::move(row);
        }
        res.value = val;
    }
    res.exact = true;
    return res;
}

} // namespace

ResponseResult worst_case_expectation(const RobustMdpInstance& inst, long s, const numvec& phi,
                                      const numvec& w) {
    return optimize_expectation(inst, s, phi, w, true);
}

ResponseResult best_case_expectation(const RobustMdpInstance& inst, long s, const numvec& phi,
                                     const numvec& w) {
    return optimize_expectation(inst, s, phi, w, false);
}

namespace {

bool row_seen(const std::vector<numvec>& rows, const numvec& cand) {
    for (const numvec& r : rows)
        if (linf_dist(r, cand) == 0.0) return true;
    return false;
}

/// Candidate extreme rows of one TV ball: nominal, all single-donor ->
/// single-receiver moves, and one spread row (largest donor split equally
/// over all other states). Single-move rows cover every positivity pattern a
/// ball element can have on top of the nominal support; the spread row adds
/// a maximal-support element used by closed-class searches.
std::vector<numvec> tv_candidate_rows(const numvec& p0, prec_t theta) {
    const std::size_t n = p0.size();
    std::vector<numvec> rows;
    rows.push_back(p0);
    if (theta <= 0.0 || n <= 1) return rows;

    for (std::size_t d = 0; d < n; ++d) {
        if (p0[d] <= 0.0) continue;
        const prec_t take = std::min(theta, p0[d]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == d) continue;
            numvec row = p0;
            row[d] -= take;
            row[r] += take;
            if (!row_seen(rows, row)) rows.push_back(std::move(row));
        }
    }

    std::size_t donor = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (p0[i] > p0[donor]) donor = i;
    const prec_t take = std::min(theta, p0[donor]);
    if (take > 0.0) {
        numvec row = p0;
        row[donor] -= take;
        const prec_t share = take / static_cast<prec_t>(n - 1);
        for (std::size_t r = 0; r < n; ++r)
            if (r != donor) row[r] += share;
        if (!row_seen(rows, row)) rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::vector<KernelBundle> extreme_kernels(const RobustMdpInstance& inst, long s, long cap) {
    const StateAmbiguity& amb = inst.ambiguity[static_cast<std::size_t>(s)];
    if (amb.variant == PVariant::FiniteKernels) {
        if (static_cast<long>(amb.kernels.size()) > cap)
            throw ExplosionGuard("extreme_kernels: state " + std::to_string(s) + " lists " +
                                 std::to_string(amb.kernels.size()) + " kernels, cap is " +
                                 std::to_string(cap));
        return amb.kernels;
    }

    std::vector<std::vector<numvec>> per_action;
    long total = 1;
    for (long a = 0; a < inst.n_actions; ++a) {
        per_action.push_back(tv_candidate_rows(amb.nominal[static_cast<std::size_t>(a)],
                                               amb.radius[static_cast<std::size_t>(a)]));
        total *= static_cast<long>(per_action.back().size());
        if (total > cap)
            throw ExplosionGuard("extreme_kernels: state " + std::to_string(s) +
                                 " would enumerate more than " + std::to_string(cap) + " bundles");
    }

    // Cartesian product over actions, lowest action index cycling slowest.
    std::vector<KernelBundle> out;
    out.reserve(static_cast<std::size_t>(total));
    indvec pick(static_cast<std::size_t>(inst.n_actions), 0);
    while (true) {
        KernelBundle bundle;
        bundle.reserve(static_cast<std::size_t>(inst.n_actions));
        for (long a = 0; a < inst.n_actions; ++a)
            bundle.push_back(per_action[static_cast<std::size_t>(a)]
                                       [static_cast<std::size_t>(pick[static_cast<std::size_t>(a)])]);
        out.push_back(std::move(bundle));
        long a = inst.n_actions - 1;
        while (a >= 0) {
            auto& idx = pick[static_cast<std::size_t>(a)];
            if (++idx < static_cast<long>(per_action[static_cast<std::size_t>(a)].size())) break;
            idx = 0;
            --a;
        }
        if (a < 0) break;
    }
    return out;
}

} // namespace robmdp
