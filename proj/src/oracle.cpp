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

#include "robmdp/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "robmdp/enumerate.hpp"
#include "robmdp/errors.hpp"
#include "robmdp/linalg.hpp"

namespace robmdp {

namespace {

/// States grouped into closed strongly connected components of the support
/// graph, plus the list of transient states.
struct ChainDecomposition {
    std::vector<indvec> classes;
    indvec transient;
};

ChainDecomposition decompose(const std::vector<numvec>& rows) {
    const long n = static_cast<long>(rows.size());
    // Reachability closure over paths of length >= 1.
    std::vector<std::vector<bool>> cl(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) cl[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 0.0;
    for (long k = 0; k < n; ++k)
        for (long i = 0; i < n; ++i) {
            if (!cl[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) continue;
            for (long j = 0; j < n; ++j)
                if (cl[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]) cl[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        }

    ChainDecomposition out;
    std::vector<bool> placed(static_cast<std::size_t>(n), false);
    for (long i = 0; i < n; ++i) {
        if (placed[static_cast<std::size_t>(i)]) continue;
        indvec scc;
        for (long j = 0; j < n; ++j)
            if (j == i || (cl[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] && cl[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]))
                scc.push_back(j);
        bool closed = true;
        for (long x : scc)
            for (long y = 0; y < n && closed; ++y)
                if (rows[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] > 0.0 &&
                    std::find(scc.begin(), scc.end(), y) == scc.end())
                    closed = false;
        if (closed) {
            for (long x : scc) placed[static_cast<std::size_t>(x)] = true;
            out.classes.push_back(std::move(scc));
        } else {
            placed[static_cast<std::size_t>(i)] = true;
            out.transient.push_back(i);
        }
    }
    std::sort(out.transient.begin(), out.transient.end());
    return out;
}

/// Stationary distribution of the chain restricted to one closed class,
/// solving pi^T P = pi^T with the last equation replaced by normalization.
numvec class_stationary(const std::vector<numvec>& rows, const indvec& cls) {
    const long m = static_cast<long>(cls.size());
    Matrix a(m, m);
    numvec b(static_cast<std::size_t>(m), 0.0);
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j)
            a.at(i, j) = rows[static_cast<std::size_t>(cls[static_cast<std::size_t>(j)])]
                             [static_cast<std::size_t>(cls[static_cast<std::size_t>(i)])] -
                         (i == j ? 1.0 : 0.0);
    for (long j = 0; j < m; ++j) a.at(m - 1, j) = 1.0;
    b[static_cast<std::size_t>(m - 1)] = 1.0;
    return solve_linear(a, b);
}

} // namespace

numvec exact_chain_gain(const std::vector<numvec>& rows, const numvec& rewards) {
    const long n = static_cast<long>(rows.size());
    if (rewards.size() != static_cast<std::size_t>(n))
        throw DimensionMismatch("exact_chain_gain: " + std::to_string(rewards.size()) +
                                " rewards for " + std::to_string(n) + " states");
    for (const numvec& row : rows)
        if (row.size() != static_cast<std::size_t>(n))
            throw DimensionMismatch("exact_chain_gain: transition matrix is not square");
    const ChainDecomposition dec = decompose(rows);

    numvec gain(static_cast<std::size_t>(n), 0.0);
    numvec class_gain(dec.classes.size(), 0.0);
    for (std::size_t c = 0; c < dec.classes.size(); ++c) {
        const numvec pi = class_stationary(rows, dec.classes[c]);
        prec_t g = 0.0;
        for (std::size_t i = 0; i < dec.classes[c].size(); ++i)
            g += pi[i] * rewards[static_cast<std::size_t>(dec.classes[c][i])];
        class_gain[c] = g;
        for (long s : dec.classes[c]) gain[static_cast<std::size_t>(s)] = g;
    }

    if (!dec.transient.empty()) {
        // Absorption probabilities: (I - P_TT) B = P[T -> class c], one rhs
        // per closed class, reusing a single factorization.
        const long m = static_cast<long>(dec.transient.size());
        Matrix a(m, m);
        for (long i = 0; i < m; ++i)
            for (long j = 0; j < m; ++j)
                a.at(i, j) = (i == j ? 1.0 : 0.0) -
                             rows[static_cast<std::size_t>(dec.transient[static_cast<std::size_t>(i)])]
                                 [static_cast<std::size_t>(dec.transient[static_cast<std::size_t>(j)])];
        for (std::size_t c = 0; c < dec.classes.size(); ++c) {
            numvec b(static_cast<std::size_t>(m), 0.0);
            for (long i = 0; i < m; ++i)
                for (long t : dec.classes[c])
                    b[static_cast<std::size_t>(i)] +=
                        rows[static_cast<std::size_t>(dec.transient[static_cast<std::size_t>(i)])][static_cast<std::size_t>(t)];
            const numvec absorb = solve_linear(a, b);
            for (long i = 0; i < m; ++i)
                gain[static_cast<std::size_t>(dec.transient[static_cast<std::size_t>(i)])] +=
                    absorb[static_cast<std::size_t>(i)] * class_gain[c];
        }
    }
    return gain;
}

numvec power_average_gain(const std::vector<numvec>& rows, const numvec& rewards, long n_terms) {
    if (n_terms < 1) throw ValidationError("power_average_gain: n_terms must be positive");
    const std::size_t n = rows.size();
    if (rewards.size() != n)
        throw DimensionMismatch("power_average_gain: " + std::to_string(rewards.size()) +
                                " rewards for " + std::to_string(n) + " states");
    for (const numvec& row : rows)
        if (row.size() != n)
            throw DimensionMismatch("power_average_gain: transition matrix is not square");
    numvec x = rewards;  // (P^k r), starting at k = 0
    std::vector<KahanSum> acc(n);
    for (std::size_t s = 0; s < n; ++s) acc[s].add(x[s]);
    numvec next(n);
    for (long k = 1; k < n_terms; ++k) {
        for (std::size_t s = 0; s < n; ++s) next[s] = dot(rows[s], x);
        x.swap(next);
        for (std::size_t s = 0; s < n; ++s) acc[s].add(x[s]);
    }
    numvec out(n);
    for (std::size_t s = 0; s < n; ++s) out[s] = acc[s].value() / static_cast<prec_t>(n_terms);
    return out;
}

OracleResult exhaustive_values(const RobustMdpInstance& inst, const numvec& mu,
                               std::optional<prec_t> gamma, long cap) {
    if (inst.controller_set.variant == QVariant::FullSimplex)
        throw UnsupportedCombination(
            "exhaustive_values: the full simplex controller class is uncountable; "
            "restrict to Dirac actions or a finite distribution list");
    if (mu.size() != static_cast<std::size_t>(inst.n_states))
        throw DimensionMismatch("exhaustive_values: mu has " + std::to_string(mu.size()) +
                                " entries for " + std::to_string(inst.n_states) + " states");
    check_probability_row(mu, inst.n_states, "mu");
    if (gamma && !(*gamma > 0.0 && *gamma < 1.0))
        throw ValidationError("exhaustive_values: gamma outside (0,1)");

    const auto ctrls = controller_policy_products(inst, cap);
    const auto advs = adversary_extreme_products(inst, cap);
    if (static_cast<long>(ctrls.size()) > cap / std::max<long>(1, static_cast<long>(advs.size())))
        throw EnumerationCapExceeded("exhaustive_values: " + std::to_string(ctrls.size()) + " x " +
                                     std::to_string(advs.size()) + " policy pairs exceed the cap of " +
                                     std::to_string(cap));

    OracleResult out;
    out.n_controller = static_cast<long>(ctrls.size());
    out.n_adversary = static_cast<long>(advs.size());
    out.discounted = gamma.has_value();
    out.gamma = gamma.value_or(0.0);
    out.values.reserve(ctrls.size() * advs.size());

    const long n = inst.n_states;
    for (const auto& ctrl : ctrls)
        for (const auto& adv : advs) {
            const auto [rows, rewards] = induced_chain(inst, ctrl, adv);
            if (gamma) {
                Matrix a(n, n);
                for (long i = 0; i < n; ++i)
                    for (long j = 0; j < n; ++j)
                        a.at(i, j) = (i == j ? 1.0 : 0.0) -
                                     *gamma * rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                out.values.push_back(solve_linear(a, rewards));
            } else {
                out.values.push_back(exact_chain_gain(rows, rewards));
            }
        }

    const long nc = out.n_controller, na = out.n_adversary;
    auto mu_value = [&](long c, long a) {
        return dot(mu, out.values[static_cast<std::size_t>(c * na + a)]);
    };
    out.supinf = -INFTY;
    for (long c = 0; c < nc; ++c) {
        prec_t inner = INFTY;
        for (long a = 0; a < na; ++a) inner = std::min(inner, mu_value(c, a));
        out.supinf = std::max(out.supinf, inner);
    }
    out.infsup = INFTY;
    for (long a = 0; a < na; ++a) {
        prec_t inner = -INFTY;
        for (long c = 0; c < nc; ++c) inner = std::max(inner, mu_value(c, a));
        out.infsup = std::min(out.infsup, inner);
    }

    out.supinf_pointwise.assign(static_cast<std::size_t>(n), -INFTY);
    out.infsup_pointwise.assign(static_cast<std::size_t>(n), INFTY);
    for (long s = 0; s < n; ++s) {
        for (long c = 0; c < nc; ++c) {
            prec_t inner = INFTY;
            for (long a = 0; a < na; ++a)
                inner = std::min(inner, out.values[static_cast<std::size_t>(c * na + a)][static_cast<std::size_t>(s)]);
            out.supinf_pointwise[static_cast<std::size_t>(s)] =
                std::max(out.supinf_pointwise[static_cast<std::size_t>(s)], inner);
        }
        for (long a = 0; a < na; ++a) {
            prec_t inner = -INFTY;
            for (long c = 0; c < nc; ++c)
                inner = std::max(inner, out.values[static_cast<std::size_t>(c * na + a)][static_cast<std::size_t>(s)]);
            out.infsup_pointwise[static_cast<std::size_t>(s)] =
                std::min(out.infsup_pointwise[static_cast<std::size_t>(s)], inner);
        }
    }
    return out;
}

} // namespace robmdp
