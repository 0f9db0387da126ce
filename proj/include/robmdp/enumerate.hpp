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

#include <vector>

#include "robmdp/model.hpp"

namespace robmdp {

/// Distinct action supports realizable by the controller set, together with
/// one representative choice per support. For DiracOnly and FullSimplex the
/// supports are the singletons: reachability through a mixed row equals the
/// union of reachability through its support actions, so vertices exhaust
/// the support patterns that matter.
struct ControllerPatterns {
    std::vector<std::vector<bool>> supports;
    std::vector<numvec> representatives;
};

ControllerPatterns controller_support_patterns(const RobustMdpInstance& inst);

/// Finite choice list that spans the controller set for enumeration purposes:
/// the identity rows for DiracOnly, the listed distributions for
/// FiniteDistributions, and the simplex vertices for FullSimplex (exact for
/// any objective that is linear in the controller row).
std::vector<numvec> controller_vertex_choices(const RobustMdpInstance& inst);

/// Advance a mixed-radix counter with the rightmost digit fastest.
/// Returns false once the counter wraps back to all zeros.
bool next_odometer(indvec& digits, const indvec& radix);

/// All stationary controller policies built from controller_vertex_choices,
/// in row-major order (state 0 most significant). Throws
/// EnumerationCapExceeded when the product exceeds cap.
std::vector<StationaryControllerPolicy> controller_policy_products(const RobustMdpInstance& inst,
                                                                   long cap = POLICY_ENUM_CAP);

/// All stationary adversary policies built from the per-state extreme kernel
/// bundles, in row-major order. Throws EnumerationCapExceeded when the
/// product exceeds cap, and ExplosionGuard when a single state's bundle list
/// is already too large.
std::vector<StationaryAdversaryPolicy> adversary_extreme_products(const RobustMdpInstance& inst,
                                                                  long cap = POLICY_ENUM_CAP);

} // namespace robmdp
