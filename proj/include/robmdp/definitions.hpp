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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace robmdp {

/// Default precision type used throughout the library.
using prec_t = double;

/// Vector of reals.
using numvec = std::vector<prec_t>;

/// Vector of indices.
using indvec = std::vector<long>;

/// Tolerance accepted when checking that a probability row sums to one.
constexpr prec_t ROW_SUM_TOL = 1e-12;

/// Target backward-error for dense linear solves (enforced by refinement).
constexpr prec_t LINSOLVE_RESIDUAL_TOL = 1e-10;

/// Hard cap on enumerated ambiguity vertices per state.
constexpr long EXTREME_KERNEL_CAP = 10000;

/// Hard cap on enumerated stationary policies / kernel products.
constexpr long POLICY_ENUM_CAP = 4096;

/// Infinity shorthand.
constexpr prec_t INFTY = std::numeric_limits<prec_t>::infinity();

/// Dot product; sizes must agree.
inline prec_t dot(const numvec& x, const numvec& y) {
    prec_t r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) r += x[i] * y[i];
    return r;
}

/// L-infinity norm.
inline prec_t linf_norm(const numvec& x) {
    prec_t r = 0.0;
    for (prec_t v : x) r = std::max(r, std::fabs(v));
    return r;
}

/// L-infinity distance between two vectors of equal length.
inline prec_t linf_dist(const numvec& x, const numvec& y) {
    prec_t r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::fabs(x[i] - y[i]));
    return r;
}

/// Span seminorm: max(v) - min(v); zero for constant vectors.
inline prec_t span(const numvec& v) {
    if (v.empty()) return 0.0;
    auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    return *mx - *mn;
}

/// Compensated (Kahan) accumulator for long reward sums.
struct KahanSum {
    prec_t sum = 0.0;
    prec_t carry = 0.0;

    void add(prec_t x) {
        prec_t y = x - carry;
        prec_t t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    prec_t value() const { return sum; }
};

/// Index of the smallest element, ties broken by lowest index.
inline long argmin_lowest(const numvec& v) {
    long best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[best]) best = static_cast<long>(i);
    return best;
}

/// Index of the largest element, ties broken by lowest index.
inline long argmax_lowest(const numvec& v) {
    long best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = static_cast<long>(i);
    return best;
}

} // namespace robmdp
