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

#include "robmdp/model.hpp"

namespace robmdp {

/// Result of optimizing an expectation over one state's ambiguity set.
struct ResponseResult {
    prec_t value = 0.0;
    /// The optimizing element (kernel index and/or explicit rows). Plugging
    /// it back reproduces value to 1e-10.
    StationaryAdversaryPolicy::StateChoice choice;
    /// True when computed by exact enumeration or a closed form.
    bool exact = true;
};

/// One ambiguity-set element for a single state: a row per action.
using KernelBundle = std::vector<numvec>;

/// Extreme row of a TV ball: greedily move up to theta of probability mass
/// from the highest-w states onto the single lowest-w state (worst = true),
/// or the mirror image (worst = false). Ties in w break toward the lowest
/// state index; mass never moves between states of equal w. This attains
/// inf/sup of <p, w> over the ball exactly.
numvec tv_extreme_row(const numvec& p0, prec_t theta, const numvec& w, bool worst);

/// inf over the state's ambiguity set of sum_a phi(a) * <p_a, w>.
/// FiniteKernels: exact minimum over the list (ties -> lowest index).
/// SaTvBalls: exact per-action greedy TV response.
ResponseResult worst_case_expectation(const RobustMdpInstance& inst, long s, const numvec& phi,
                                      const numvec& w);

/// sup counterpart of worst_case_expectation.
ResponseResult best_case_expectation(const RobustMdpInstance& inst, long s, const numvec& phi,
                                     const numvec& w);

/// Finite list of ambiguity-set elements for state s whose positivity
/// patterns exhaust the set's: FiniteKernels returns the list itself;
/// SaTvBalls returns per-action products of {nominal, every single-donor ->
/// single-receiver extreme row, one spread row}. Any transition possible
/// under some element of the set is possible under some returned bundle.
///
/// @throws ExplosionGuard when the product would exceed cap
std::vector<KernelBundle> extreme_kernels(const RobustMdpInstance& inst, long s,
                                          long cap = EXTREME_KERNEL_CAP);

} // namespace robmdp
