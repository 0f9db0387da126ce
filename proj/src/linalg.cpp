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

#include "robmdp/linalg.hpp"

#include <cmath>

#include "robmdp/errors.hpp"

namespace robmdp {

namespace {
// Pivots below this magnitude are treated as a rank deficiency. Matrices in
// this library are O(1)-scaled (rows of stochastic matrices), so an absolute
// threshold is appropriate.
constexpr prec_t PIVOT_TOL = 1e-10;
} // namespace

numvec Matrix::multiply(const numvec& x) const {
    if (static_cast<long>(x.size()) != cols)
        throw DimensionMismatch("Matrix::multiply: vector length " + std::to_string(x.size()) +
                                " does not match column count " + std::to_string(cols));
    numvec y(static_cast<std::size_t>(rows), 0.0);
    for (long i = 0; i < rows; ++i) {
        prec_t acc = 0.0;
        for (long j = 0; j < cols; ++j) acc += at(i, j) * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
}

LuFactor lu_factor(const Matrix& a) {
    if (a.rows != a.cols)
        throw DimensionMismatch("lu_factor: matrix is " + std::to_string(a.rows) + "x" +
                                std::to_string(a.cols) + ", expected square");
    const long n = a.rows;
    LuFactor f;
    f.lu = a;
    f.n = n;
    f.perm.resize(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) f.perm[static_cast<std::size_t>(i)] = i;

    for (long k = 0; k < n; ++k) {
        long piv = k;
        prec_t best = std::fabs(f.lu.at(k, k));
        for (long i = k + 1; i < n; ++i) {
            prec_t v = std::fabs(f.lu.at(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best < PIVOT_TOL)
            throw SingularSystem("lu_factor: pivot " + std::to_string(best) + " below 1e-10 at column " +
                                 std::to_string(k));
        if (piv != k) {
            for (long j = 0; j < n; ++j) std::swap(f.lu.at(k, j), f.lu.at(piv, j));
            std::swap(f.perm[static_cast<std::size_t>(k)], f.perm[static_cast<std::size_t>(piv)]);
        }
        const prec_t pivval = f.lu.at(k, k);
        for (long i = k + 1; i < n; ++i) {
            const prec_t m = f.lu.at(i, k) / pivval;
            f.lu.at(i, k) = m;
            if (m == 0.0) continue;
            for (long j = k + 1; j < n; ++j) f.lu.at(i, j) -= m * f.lu.at(k, j);
        }
    }
    return f;
}

numvec lu_apply(const LuFactor& f, const numvec& b) {
    if (static_cast<long>(b.size()) != f.n)
        throw DimensionMismatch("lu_apply: rhs length " + std::to_string(b.size()) +
                                " does not match system size " + std::to_string(f.n));
    const long n = f.n;
    numvec x(static_cast<std::size_t>(n));
    // forward substitution on the permuted rhs
    for (long i = 0; i < n; ++i) {
        prec_t acc = b[static_cast<std::size_t>(f.perm[static_cast<std::size_t>(i)])];
        for (long j = 0; j < i; ++j) acc -= f.lu.at(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = acc;
    }
    // back substitution
    for (long i = n - 1; i >= 0; --i) {
        prec_t acc = x[static_cast<std::size_t>(i)];
        for (long j = i + 1; j < n; ++j) acc -= f.lu.at(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = acc / f.lu.at(i, i);
    }
    return x;
}

numvec solve_linear(const Matrix& a, const numvec& b) {
    if (a.rows != static_cast<long>(b.size()))
        throw DimensionMismatch("solve_linear: rhs length " + std::to_string(b.size()) +
                                " does not match row count " + std::to_string(a.rows));
    const LuFactor f = lu_factor(a);
    numvec x = lu_apply(f, b);

    const prec_t scale = std::max(static_cast<prec_t>(1.0), linf_norm(b));
    for (int pass = 0; pass < 3; ++pass) {
        numvec r = a.multiply(x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
        if (linf_norm(r) <= LINSOLVE_RESIDUAL_TOL * scale) break;
        const numvec d = lu_apply(f, r);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += d[i];
    }
    return x;
}

} // namespace robmdp
