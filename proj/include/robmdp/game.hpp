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

#include "robmdp/ambiguity.hpp"
#include "robmdp/model.hpp"

namespace robmdp {

/// Order of optimization in the per-state game and in the fixed-point
/// equations built from it.
enum class Orientation { SupInf, InfSup };

/// Saddle data of one state's game with payoff
///   sum_a phi(a) * (r(s,a) - gain_shift + gamma * <p_a, w>).
struct StateGameSolution {
    prec_t value = 0.0;
    /// Distribution over actions achieving the outer sup (or the inner sup).
    numvec controller_choice;
    /// Ambiguity element achieving the inf against controller_choice (sup-inf)
    /// or the outer inf (inf-sup).
    StationaryAdversaryPolicy::StateChoice adversary_choice;
    Orientation orientation = Orientation::SupInf;
    /// Certified slack: plugging the choices back reproduces value within
    /// this bound. Zero for enumeration paths, LP roundoff otherwise.
    prec_t gap_bound = 0.0;
};

/// sup over the controller set, inf over the state's ambiguity set.
///
/// Supported pairings: every controller variant with FiniteKernels;
/// DiracOnly / FiniteDistributions with SaTvBalls (per-action greedy TV
/// response). gamma may be 1 (undiscounted sweep with a gain shift).
///
/// @throws UnsupportedCombination for FullSimplex x SaTvBalls
/// @throws ToleranceNotMet when an LP path cannot certify tol
StateGameSolution solve_supinf(const RobustMdpInstance& inst, long s, const numvec& w,
                               prec_t gain_shift, prec_t gamma, prec_t tol = 1e-9);

/// inf over the ambiguity set, sup over the controller set (mirror order).
///
/// For DiracOnly x SaTvBalls the per-action rectangularity collapses the two
/// orders to the same value; FiniteDistributions x SaTvBalls solves an
/// epigraph LP over the ball polytope.
///
/// @throws UnsupportedCombination for FullSimplex x SaTvBalls
StateGameSolution solve_infsup(const RobustMdpInstance& inst, long s, const numvec& w,
                               prec_t gain_shift, prec_t gamma, prec_t tol = 1e-9);

/// Dispatch on orientation.
StateGameSolution solve_state_game(const RobustMdpInstance& inst, long s, const numvec& w,
                                   prec_t gain_shift, prec_t gamma, Orientation orientation,
                                   prec_t tol = 1e-9);

} // namespace robmdp
