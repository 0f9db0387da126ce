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

#include "robmdp/enumerate.hpp"

#include <string>

#include "robmdp/ambiguity.hpp"
#include "robmdp/errors.hpp"

namespace robmdp {

namespace {

std::vector<bool> support_of(const numvec& row) {
    std::vector<bool> sup(row.size(), false);
    for (std::size_t i = 0; i < row.size(); ++i) sup[i] = row[i] > 0.0;
    return sup;
}

/// Product of per-state counts, saturating at cap + 1 to avoid overflow.
long capped_product(const indvec& radix, long cap) {
    long prod = 1;
    for (long r : radix) {
        if (prod > cap / std::max<long>(r, 1) && r > 1) return cap + 1;
        prod *= r;
        if (prod > cap) return cap + 1;
    }
    return prod;
}

} // namespace

ControllerPatterns controller_support_patterns(const RobustMdpInstance& inst) {
    ControllerPatterns out;
    if (inst.controller_set.variant == QVariant::FiniteDistributions) {
        for (const numvec& phi : inst.controller_set.distributions) {
            const std::vector<bool> sup = support_of(phi);
            bool seen = false;
            for (const auto& existing : out.supports)
                if (existing == sup) {
                    seen = true;
                    break;
                }
            if (!seen) {
                out.supports.push_back(sup);
                out.representatives.push_back(phi);
            }
        }
        return out;
    }
    for (long a = 0; a < inst.n_actions; ++a) {
        std::vector<bool> sup(static_cast<std::size_t>(inst.n_actions), false);
        sup[static_cast<std::size_t>(a)] = true;
        numvec phi(static_cast<std::size_t>(inst.n_actions), 0.0);
        phi[static_cast<std::size_t>(a)] = 1.0;
        out.supports.push_back(std::move(sup));
        out.representatives.push_back(std::move(phi));
    }
    return out;
}

std::vector<numvec> controller_vertex_choices(const RobustMdpInstance& inst) {
    if (inst.controller_set.variant == QVariant::FullSimplex) {
        std::vector<numvec> choices;
        choices.reserve(static_cast<std::size_t>(inst.n_actions));
        for (long a = 0; a < inst.n_actions; ++a) {
            numvec phi(static_cast<std::size_t>(inst.n_actions), 0.0);
            phi[static_cast<std::size_t>(a)] = 1.0;
            choices.push_back(std::move(phi));
        }
        return choices;
    }
    return controller_choices(inst);
}

bool next_odometer(indvec& digits, const indvec& radix) {
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < radix[i]) return true;
        digits[i] = 0;
    }
    return false;
}

std::vector<StationaryControllerPolicy> controller_policy_products(const RobustMdpInstance& inst,
                                                                   long cap) {
    const std::vector<numvec> choices = controller_vertex_choices(inst);
    const long m = static_cast<long>(choices.size());
    const indvec radix(static_cast<std::size_t>(inst.n_states), m);
    const long total = capped_product(radix, cap);
    if (total > cap)
        throw EnumerationCapExceeded("controller_policy_products: " + std::to_string(m) + "^" +
                                     std::to_string(inst.n_states) + " policies exceed the cap of " +
                                     std::to_string(cap));
    std::vector<StationaryControllerPolicy> out;
    out.reserve(static_cast<std::size_t>(total));
    indvec digits(static_cast<std::size_t>(inst.n_states), 0);
    do {
        StationaryControllerPolicy pol;
        pol.rows.reserve(digits.size());
        for (long d : digits) pol.rows.push_back(choices[static_cast<std::size_t>(d)]);
        out.push_back(std::move(pol));
    } while (next_odometer(digits, radix));
    return out;
}

std::vector<StationaryAdversaryPolicy> adversary_extreme_products(const RobustMdpInstance& inst,
                                                                  long cap) {
    std::vector<std::vector<KernelBundle>> bundles;
    indvec radix;
    bundles.reserve(static_cast<std::size_t>(inst.n_states));
    for (long s = 0; s < inst.n_states; ++s) {
        bundles.push_back(extreme_kernels(inst, s));
        radix.push_back(static_cast<long>(bundles.back().size()));
    }
    const long total = capped_product(radix, cap);
    if (total > cap)
        throw EnumerationCapExceeded(
            "adversary_extreme_products: extreme kernel products exceed the cap of " +
            std::to_string(cap));
    std::vector<StationaryAdversaryPolicy> out;
    out.reserve(static_cast<std::size_t>(total));
    indvec digits(static_cast<std::size_t>(inst.n_states), 0);
    do {
        StationaryAdversaryPolicy adv;
        adv.choices.reserve(digits.size());
        for (std::size_t s = 0; s < digits.size(); ++s) {
            const bool finite = inst.ambiguity[s].variant == PVariant::FiniteKernels;
            StationaryAdversaryPolicy::StateChoice ch;
            ch.kernel_index = finite ? digits[s] : -1;
            ch.rows = bundles[s][static_cast<std::size_t>(digits[s])];
            adv.choices.push_back(std::move(ch));
        }
        out.push_back(std::move(adv));
    } while (next_odometer(digits, radix));
    return out;
}

} // namespace robmdp
