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

#include "robmdp/definitions.hpp"

namespace robmdp {

enum class LpRel { LE, GE, EQ };

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Optimal;
    prec_t objective = 0.0;
    numvec x;
    long iterations = 0;
};

/// Minimize c.x subject to A x (rel) b, x >= 0, with a dense two-phase
/// simplex. Bland's rule everywhere (lowest-index entering variable, ratio
/// ties broken by lowest basic-variable index), so the method terminates on
/// degenerate problems. Sizes here are tiny; no factorization updates.
LpResult solve_lp_min(const std::vector<numvec>& a, const numvec& b, const std::vector<LpRel>& rel,
                      const numvec& c);

struct MatrixGameResult {
    /// max over row mixtures of the min column payoff, re-evaluated at the
    /// returned strategy (so the strategy reproduces it by construction).
    prec_t value = 0.0;
    numvec row_strategy;
    /// Column attaining the inner min against row_strategy (lowest index).
    long min_col = 0;
    /// |LP objective - re-evaluated value|.
    prec_t lp_gap = 0.0;
};

/// Zero-sum matrix game, row player maximizes payoff[i][j] over mixtures.
MatrixGameResult solve_matrix_game_maximin(const std::vector<numvec>& payoff);

} // namespace robmdp
