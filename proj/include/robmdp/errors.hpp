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

#include <stdexcept>
#include <string>

namespace robmdp {

/// Instance data violates a documented contract (row sums, ranges, shapes
/// referenced by field name and index in the message).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Input file is not syntactically valid JSON or misses required fields.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Vector or matrix arguments have inconsistent sizes.
struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// Requested controller-set / ambiguity-set pairing has no implemented solver.
struct UnsupportedCombination : std::runtime_error {
    explicit UnsupportedCombination(const std::string& what) : std::runtime_error(what) {}
};

/// The LP solver could not certify the requested accuracy.
struct ToleranceNotMet : std::runtime_error {
    explicit ToleranceNotMet(const std::string& what) : std::runtime_error(what) {}
};

/// Vertex enumeration of an ambiguity set would exceed its hard cap.
struct ExplosionGuard : std::runtime_error {
    explicit ExplosionGuard(const std::string& what) : std::runtime_error(what) {}
};

/// Policy or kernel-product enumeration would exceed its hard cap.
struct EnumerationCapExceeded : std::runtime_error {
    explicit EnumerationCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative solver hit its iteration cap; message carries the last residual.
struct MaxItersExceeded : std::runtime_error {
    MaxItersExceeded(const std::string& what, double last_residual_)
        : std::runtime_error(what), last_residual(last_residual_) {}
    double last_residual;
};

/// Target state cannot be reached from some start under the given policy.
struct TargetUnreachable : std::runtime_error {
    TargetUnreachable(const std::string& what, long blocked_state_)
        : std::runtime_error(what), blocked_state(blocked_state_) {}
    long blocked_state;
};

/// Linear system is singular to working precision.
struct SingularSystem : std::runtime_error {
    explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

/// Greedy policy extracted from (u, alpha) failed its re-verification.
struct ExtractionFailed : std::runtime_error {
    explicit ExtractionFailed(const std::string& what) : std::runtime_error(what) {}
};

/// A documented hypothesis of the requested analysis does not hold.
struct PreconditionFailed : std::runtime_error {
    explicit PreconditionFailed(const std::string& what) : std::runtime_error(what) {}
};

} // namespace robmdp
