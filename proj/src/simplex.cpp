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

#include "robmdp/simplex.hpp"

#include <cmath>

#include "robmdp/errors.hpp"

namespace robmdp {

namespace {

constexpr prec_t LP_EPS = 1e-9;
constexpr long LP_MAX_PIVOTS = 20000;

// Dense simplex tableau: constraint rows plus two cost rows (phase-1 and
// phase-2 objectives) that are updated by every pivot, so phase 2 can start
// directly from the phase-1 optimum.
struct Tableau {
    long m = 0;       // constraint rows
    long n = 0;       // columns excluding rhs
    std::vector<numvec> rows;
    numvec cost1, cost2; // reduced-cost rows; last entry = -objective
    indvec basis;

    void pivot(long r, long c) {
        numvec& prow = rows[static_cast<std::size_t>(r)];
        const prec_t p = prow[static_cast<std::size_t>(c)];
        for (prec_t& v : prow) v /= p;
        auto eliminate = [&](numvec& row) {
            const prec_t f = row[static_cast<std::size_t>(c)];
            if (f == 0.0) return;
            for (std::size_t j = 0; j < row.size(); ++j) row[j] -= f * prow[j];
        };
        for (long i = 0; i < m; ++i)
            if (i != r) eliminate(rows[static_cast<std::size_t>(i)]);
        eliminate(cost1);
        eliminate(cost2);
        basis[static_cast<std::size_t>(r)] = c;
    }
};

// One simplex phase with Bland's rule on the given cost row. Returns false
// when the problem is unbounded in the phase objective.
bool run_phase(Tableau& t, numvec& cost, long n_usable, long& iterations) {
    while (true) {
        if (++iterations > LP_MAX_PIVOTS)
            throw ToleranceNotMet("simplex: pivot cap exceeded (" + std::to_string(LP_MAX_PIVOTS) + ")");
        long enter = -1;
        for (long j = 0; j < n_usable; ++j)
            if (cost[static_cast<std::size_t>(j)] < -LP_EPS) {
                enter = j;
                break; // Bland: lowest index
            }
        if (enter < 0) return true;

        long leave = -1;
        prec_t best_ratio = 0.0;
        for (long i = 0; i < t.m; ++i) {
            const prec_t aij = t.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
            if (aij <= LP_EPS) continue;
            const prec_t rhs = t.rows[static_cast<std::size_t>(i)].back();
            const prec_t ratio = rhs / aij;
            if (leave < 0 || ratio < best_ratio - LP_EPS ||
                (std::fabs(ratio - best_ratio) <= LP_EPS &&
                 t.basis[static_cast<std::size_t>(i)] < t.basis[static_cast<std::size_t>(leave)])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0) return false;
        t.pivot(leave, enter);
    }
}

} // namespace

LpResult solve_lp_min(const std::vector<numvec>& a, const numvec& b, const std::vector<LpRel>& rel,
                      const numvec& c) {
    const long m = static_cast<long>(a.size());
    const long nvar = static_cast<long>(c.size());
    if (static_cast<long>(b.size()) != m || static_cast<long>(rel.size()) != m)
        throw DimensionMismatch("solve_lp_min: rows of A, b, rel must agree");
    for (long i = 0; i < m; ++i)
        if (static_cast<long>(a[static_cast<std::size_t>(i)].size()) != nvar)
            throw DimensionMismatch("solve_lp_min: A row " + std::to_string(i) +
                                    " has length " +
                                    std::to_string(a[static_cast<std::size_t>(i)].size()) +
                                    ", expected " + std::to_string(nvar));

    // Column layout: [original | slack/surplus | artificial], rhs last.
    long n_slack = 0;
    for (LpRel r : rel)
        if (r != LpRel::EQ) ++n_slack;

    // Rows are first normalized to b >= 0; artificials are added for rows
    // whose slack cannot start basic (EQ rows and GE rows).
    std::vector<LpRel> nrel = rel;
    std::vector<numvec> na(a.begin(), a.end());
    numvec nb = b;
    for (long i = 0; i < m; ++i) {
        if (nb[static_cast<std::size_t>(i)] < 0.0) {
            nb[static_cast<std::size_t>(i)] = -nb[static_cast<std::size_t>(i)];
            for (prec_t& v : na[static_cast<std::size_t>(i)]) v = -v;
            if (nrel[static_cast<std::size_t>(i)] == LpRel::LE)
                nrel[static_cast<std::size_t>(i)] = LpRel::GE;
            else if (nrel[static_cast<std::size_t>(i)] == LpRel::GE)
                nrel[static_cast<std::size_t>(i)] = LpRel::LE;
        }
    }

    long n_art = 0;
    for (LpRel r : nrel)
        if (r != LpRel::LE) ++n_art;

    const long n_total = nvar + n_slack + n_art;
    Tableau t;
    t.m = m;
    t.n = n_total;
    t.rows.assign(static_cast<std::size_t>(m), numvec(static_cast<std::size_t>(n_total) + 1, 0.0));
    t.basis.assign(static_cast<std::size_t>(m), -1);

    long slack_at = nvar;
    long art_at = nvar + n_slack;
    for (long i = 0; i < m; ++i) {
        numvec& row = t.rows[static_cast<std::size_t>(i)];
        for (long j = 0; j < nvar; ++j)
            row[static_cast<std::size_t>(j)] = na[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        row.back() = nb[static_cast<std::size_t>(i)];
        switch (nrel[static_cast<std::size_t>(i)]) {
        case LpRel::LE:
            row[static_cast<std::size_t>(slack_at)] = 1.0;
            t.basis[static_cast<std::size_t>(i)] = slack_at++;
            break;
        case LpRel::GE:
            row[static_cast<std::size_t>(slack_at++)] = -1.0;
            row[static_cast<std::size_t>(art_at)] = 1.0;
            t.basis[static_cast<std::size_t>(i)] = art_at++;
            break;
        case LpRel::EQ:
            row[static_cast<std::size_t>(art_at)] = 1.0;
            t.basis[static_cast<std::size_t>(i)] = art_at++;
            break;
        }
    }

    // Phase-1 cost: sum of artificials, expressed in reduced form over the
    // starting basis. Phase-2 cost: the original objective.
    t.cost1.assign(static_cast<std::size_t>(n_total) + 1, 0.0);
    t.cost2.assign(static_cast<std::size_t>(n_total) + 1, 0.0);
    for (long j = nvar + n_slack; j < n_total; ++j) t.cost1[static_cast<std::size_t>(j)] = 1.0;
    for (long i = 0; i < m; ++i)
        if (t.basis[static_cast<std::size_t>(i)] >= nvar + n_slack)
            for (std::size_t j = 0; j < t.cost1.size(); ++j)
                t.cost1[j] -= t.rows[static_cast<std::size_t>(i)][j];
    for (long j = 0; j < nvar; ++j) t.cost2[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)];

    LpResult res;
    if (n_art > 0) {
        if (!run_phase(t, t.cost1, n_total, res.iterations))
            throw ToleranceNotMet("simplex: phase-1 objective unbounded (internal inconsistency)");
        const prec_t art_sum = -t.cost1.back();
        if (art_sum > 1e-7) {
            res.status = LpStatus::Infeasible;
            return res;
        }
        // Drive leftover artificials out of the basis; an all-zero row in the
        // structural columns is a redundant constraint and can stay put (its
        // rhs is ~0 and the artificial never re-enters: its phase-2 use is
        // blocked by excluding artificial columns below).
        for (long i = 0; i < m; ++i) {
            if (t.basis[static_cast<std::size_t>(i)] < nvar + n_slack) continue;
            for (long j = 0; j < nvar + n_slack; ++j) {
                if (std::fabs(t.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > LP_EPS) {
                    t.pivot(i, j);
                    break;
                }
            }
        }
    }

    if (!run_phase(t, t.cost2, nvar + n_slack, res.iterations)) {
        res.status = LpStatus::Unbounded;
        return res;
    }

    res.x.assign(static_cast<std::size_t>(nvar), 0.0);
    for (long i = 0; i < m; ++i) {
        const long bi = t.basis[static_cast<std::size_t>(i)];
        if (bi < nvar) res.x[static_cast<std::size_t>(bi)] = t.rows[static_cast<std::size_t>(i)].back();
    }
    for (prec_t& v : res.x)
        if (v < 0.0 && v > -1e-11) v = 0.0; // clean roundoff on basic zeros
    res.objective = dot(c, res.x);
    res.status = LpStatus::Optimal;
    return res;
}

MatrixGameResult solve_matrix_game_maximin(const std::vector<numvec>& payoff) {
    const long m = static_cast<long>(payoff.size());
    if (m == 0) throw DimensionMismatch("matrix game: no rows");
    const long n = static_cast<long>(payoff[0].size());
    for (const numvec& row : payoff)
        if (static_cast<long>(row.size()) != n)
            throw DimensionMismatch("matrix game: ragged payoff matrix");

    // Variables: [phi_0..phi_{m-1}, t+, t-] >= 0.
    // maximize t  ==  minimize (t- - t+)
    // s.t.  sum_i phi_i payoff[i][j] - t+ + t- >= 0   for every column j
    //       sum_i phi_i = 1
    std::vector<numvec> a;
    numvec b;
    std::vector<LpRel> rel;
    for (long j = 0; j < n; ++j) {
        numvec row(static_cast<std::size_t>(m) + 2, 0.0);
        for (long i = 0; i < m; ++i)
            row[static_cast<std::size_t>(i)] = payoff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        row[static_cast<std::size_t>(m)] = -1.0;
        row[static_cast<std::size_t>(m) + 1] = 1.0;
        a.push_back(std::move(row));
        b.push_back(0.0);
        rel.push_back(LpRel::GE);
    }
    numvec ones(static_cast<std::size_t>(m) + 2, 0.0);
    for (long i = 0; i < m; ++i) ones[static_cast<std::size_t>(i)] = 1.0;
    a.push_back(std::move(ones));
    b.push_back(1.0);
    rel.push_back(LpRel::EQ);

    numvec c(static_cast<std::size_t>(m) + 2, 0.0);
    c[static_cast<std::size_t>(m)] = -1.0;
    c[static_cast<std::size_t>(m) + 1] = 1.0;

    const LpResult lp = solve_lp_min(a, b, rel, c);
    if (lp.status != LpStatus::Optimal)
        throw ToleranceNotMet("matrix game: LP not optimal (internal inconsistency)");

    MatrixGameResult res;
    res.row_strategy.assign(lp.x.begin(), lp.x.begin() + m);
    prec_t sum = 0.0;
    for (prec_t v : res.row_strategy) sum += v;
    for (prec_t& v : res.row_strategy) v /= sum; // remove 1e-12-scale drift

    // Re-evaluate so the reported value is exactly what the strategy earns.
    prec_t best = INFTY;
    long best_col = 0;
    for (long j = 0; j < n; ++j) {
        prec_t v = 0.0;
        for (long i = 0; i < m; ++i)
            v += res.row_strategy[static_cast<std::size_t>(i)] *
                 payoff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (v < best) {
            best = v;
            best_col = j;
        }
    }
    res.value = best;
    res.min_col = best_col;
    res.lp_gap = std::fabs(-lp.objective - best);
    return res;
}

} // namespace robmdp
