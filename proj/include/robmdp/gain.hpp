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
#include <vector>

#include "robmdp/bellman.hpp"
#include "robmdp/game.hpp"
#include "robmdp/model.hpp"

namespace robmdp {

/// Outcome of the constant-gain solver.
///  - Converged: a pair (u, alpha) satisfies the constant-gain equation up to
///    the requested tolerance.
///  - SpanUnbounded: the spans of the discounted values grow like c/(1-gamma),
///    which rules out a constant-gain solution for this orientation.
///  - Inconclusive: the discount schedule was exhausted without either a
///    verified solution or clear span growth.
enum class GainVerdict { Converged, SpanUnbounded, Inconclusive };

/// Candidate solution of u(s) + alpha = (T_1 u)(s) for one orientation.
struct GainSolution {
    numvec u;                 // relative values, normalized so that min u = 0
    prec_t alpha = 0.0;       // constant gain, clamped to [0,1]
    Orientation orientation = Orientation::SupInf;
    prec_t residual = 0.0;    // verify_constant_gain of the returned pair
    numvec gamma_trace;       // discount factors visited by the schedule
    GainVerdict verdict = GainVerdict::Inconclusive;
    long iterations = 0;      // total outer strategy-iteration steps
};

std::string to_string(GainVerdict verdict);

/// Sup-side residual of the constant-gain equation:
///   max_s | value of the state game at (w = u, shift = alpha, gamma = 1) - u(s) |.
/// This is an independent check: it re-solves every state game from scratch
/// and never reuses iterates from the solver that produced (u, alpha).
prec_t verify_constant_gain(const RobustMdpInstance& inst, const numvec& u, prec_t alpha,
                            Orientation orientation, prec_t game_tol = 1e-9);

/// Vanishing-discount solver for the constant-gain equation. Walks the
/// schedule gamma_k = 1 - 2^-k for k = 4..20, warm-starting each relative
/// solve from the previous saddle pair. A step converges when consecutive
/// (u, alpha) iterates agree within tol/2 and either the raw pair or its
/// Richardson extrapolation (2 x_k - x_{k-1}) verifies below tol; the
/// extrapolation matters near k = 20 where the raw discretization error is
/// itself of order tol. Span growth fitted to c/(1-gamma) with R^2 > 0.999
/// and c > 10 tol yields SpanUnbounded.
GainSolution solve_constant_gain(const RobustMdpInstance& inst, Orientation orientation,
                                 prec_t tol = 1e-6);

/// Greedy controller policy extracted from a verified pair (u, alpha): per
/// state the maximizing choice of the sup-side game at gamma = 1. Each chosen
/// row is re-verified against u independently; a mismatch beyond 10 tol
/// throws ExtractionFailed.
StationaryControllerPolicy extract_policy(const RobustMdpInstance& inst, const numvec& u,
                                          prec_t alpha, prec_t tol = 1e-6);

/// Joint report for both orientations of the constant-gain equation.
struct DualityReport {
    GainSolution supinf;
    GainSolution infsup;
    prec_t alpha_supinf = 0.0;
    prec_t alpha_infsup = 0.0;
    prec_t gap = 0.0;             // alpha_infsup - alpha_supinf
    bool both_converged = false;
    bool stationary_optimal = false;  // both converged and |gap| <= tol
};

DualityReport duality_report(const RobustMdpInstance& inst, prec_t tol = 1e-6);

/// Experimental: relative value iteration directly at gamma = 1, kept only
/// for cross-checking the vanishing-discount path on well-behaved instances.
/// Diverges or cycles on periodic chains, so it is not part of any default
/// pipeline. Throws MaxItersExceeded when the span of the Bellman update
/// fails to contract within max_iters sweeps.
GainSolution relative_value_iteration(const RobustMdpInstance& inst, Orientation orientation,
                                      prec_t tol = 1e-6, long max_iters = 100000);

} // namespace robmdp
