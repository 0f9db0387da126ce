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

/// Dense row-major matrix. Problem sizes in this library are tiny (tens of
/// states), so no effort is spent on blocking or sparsity.
struct Matrix {
    long rows = 0;
    long cols = 0;
    numvec data;

    Matrix() = default;
    Matrix(long r, long c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c), 0.0) {}

    prec_t& at(long i, long j) { return data[static_cast<std::size_t>(i * cols + j)]; }
    prec_t at(long i, long j) const { return data[static_cast<std::size_t>(i * cols + j)]; }

    static Matrix identity(long n) {
        Matrix m(n, n);
        for (long i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    /// y = A x.
    numvec multiply(const numvec& x) const;
};

/// LU factorization with partial pivoting of a square matrix.
struct LuFactor {
    Matrix lu;   // L below diagonal (unit), U on and above
    indvec perm; // row permutation applied to the input
    long n = 0;
};

/// Factor a square matrix.
///
/// @throws SingularSystem when a pivot falls below 1e-10 in absolute value.
LuFactor lu_factor(const Matrix& a);

/// Back-substitution for a single right-hand side.
numvec lu_apply(const LuFactor& f, const numvec& b);

/// Solve A x = b with partial pivoting and iterative refinement until the
/// backward residual ||A x - b||_inf drops below LINSOLVE_RESIDUAL_TOL
/// (relative to max(1, ||b||_inf)), or a small fixed number of passes.
///
/// @throws SingularSystem on tiny pivots
/// @throws DimensionMismatch when shapes disagree
numvec solve_linear(const Matrix& a, const numvec& b);

} // namespace robmdp
