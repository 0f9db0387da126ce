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

#include "robmdp/game.hpp"
#include "robmdp/model.hpp"

namespace robmdp {

/// Discounted fixed point with its convergence certificate.
struct ValueFunction {
    numvec values;
    prec_t gamma = 0.0;
    Orientation orientation = Orientation::SupInf;
    /// Measured ||Tv - v||_inf at the returned v.
    prec_t residual = 0.0;
    long iterations = 0;
};

/// One Jacobi sweep of the robust Bellman operator: every state's game is
/// solved against the same input vector.
numvec apply_operator(const RobustMdpInstance& inst, const numvec& v, prec_t gamma,
                      Orientation orientation, prec_t tol = 1e-9);

/// Discounted fixed point for gamma in (0,1), stopped when
/// ||Tv - v||_inf <= tol * (1-gamma) / (2 gamma), which certifies
/// ||v - v*||_inf <= tol/2.
///
/// Below GAMMA_POLICY_ITER_THRESHOLD this is textbook value iteration from
/// v = 0. Above it value iteration would need ~1/(1-gamma) sweeps and v ~
/// 1/(1-gamma) loses absolute precision, so the fixed point is found by
/// exact strategy iteration on the anchored representation
/// (u, beta) = (v - v(0)*1, (1-gamma) v(0)); the returned certificate is the
/// same measured residual.
///
/// @throws MaxItersExceeded carrying the last residual
ValueFunction solve_discounted(const RobustMdpInstance& inst, prec_t gamma, Orientation orientation,
                               prec_t tol = 1e-6, long max_iters = 1000000);

constexpr prec_t GAMMA_POLICY_ITER_THRESHOLD = 0.995;

/// Anchored representation of a discounted fixed point:
/// v = u + beta/(1-gamma) with u(0) = 0. Stays well-scaled as gamma -> 1.
struct RelativeValue {
    numvec u;
    prec_t beta = 0.0;
    prec_t gamma = 0.0;
    Orientation orientation = Orientation::SupInf;
    /// Measured ||Tv - v||_inf, evaluated in u-coordinates.
    prec_t residual = 0.0;
    long iterations = 0;
    /// The optimal pair found by strategy iteration (useful as a warm start).
    StationaryControllerPolicy controller;
    StationaryAdversaryPolicy adversary;
};

/// Strategy-iteration solver behind solve_discounted's high-gamma path,
/// exposed for the vanishing-discount continuation which warm-starts each
/// solve from the previous discount's saddle pair.
///
/// The stop target is max(tol * (1-gamma) / (2 gamma), 1e-12); the floor
/// covers the extreme tail where the nominal target would sit below the
/// noise of exact policy evaluation.
RelativeValue solve_discounted_relative(const RobustMdpInstance& inst, prec_t gamma,
                                        Orientation orientation, prec_t tol = 1e-6,
                                        const RelativeValue* warm_start = nullptr);

/// One point of the discount-span diagnostic curve.
struct SpanPoint {
    prec_t gamma = 0.0;
    prec_t span_value = 0.0;
    /// (1-gamma) * v(s0) with s0 = 0: the discounted gain proxy.
    prec_t alpha_proxy = 0.0;
};

/// Solve the discounted problem over an ascending grid of discounts and
/// report (gamma, span(v), alpha proxy) per grid point.
std::vector<SpanPoint> span_curve(const RobustMdpInstance& inst, const numvec& gamma_grid,
                                  Orientation orientation, prec_t tol = 1e-6);

} // namespace robmdp
