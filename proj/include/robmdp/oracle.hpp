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

#include <optional>
#include <vector>

#include "robmdp/model.hpp"

namespace robmdp {

/// Long-run average reward of a finite Markov chain from every start state:
/// closed recurrent classes get their stationary-distribution reward, and
/// transient states mix class gains by absorption probability. This is the
/// brute-force ground truth the iterative solvers are tested against; it
/// shares no code path with them.
numvec exact_chain_gain(const std::vector<numvec>& rows, const numvec& rewards);

/// Cesaro average (1/N) sum_{k<N} (P^k r)(s), the definition-level check for
/// exact_chain_gain. O(N n^2), intended for tiny chains only.
numvec power_average_gain(const std::vector<numvec>& rows, const numvec& rewards, long n_terms);

/// Exhaustive table of values over stationary vertex policies: every
/// controller product (Dirac actions or the listed distributions) against
/// every adversary extreme kernel product.
struct OracleResult {
    long n_controller = 0;
    long n_adversary = 0;
    bool discounted = false;
    prec_t gamma = 0.0;
    std::vector<numvec> values;   // row-major: values[ctrl * n_adversary + adv]
    prec_t supinf = 0.0;          // max over controllers of min over adversaries of mu . value
    prec_t infsup = 0.0;          // min over adversaries of max over controllers of mu . value
    numvec supinf_pointwise;      // per-state max-min
    numvec infsup_pointwise;      // per-state min-max
};

/// Enumerates the stationary policy classes and fills the table; average
/// gains by default, discounted values when gamma is given. Refuses the full
/// simplex controller set outright: its stationary class is uncountable and
/// the whole point of this module is to stay unconditionally trustworthy.
OracleResult exhaustive_values(const RobustMdpInstance& inst, const numvec& mu,
                               std::optional<prec_t> gamma = std::nullopt,
                               long cap = POLICY_ENUM_CAP);

} // namespace robmdp
