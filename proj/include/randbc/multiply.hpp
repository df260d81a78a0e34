#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "randbc/formula.hpp"
#include "randbc/matrix.hpp"
#include "randbc/precision.hpp"

namespace randbc {

/// Counters filled in by the instrumented multiply routines.
struct MultiplyStats {
    std::atomic<std::uint64_t> leaf_multiplies{0};
};

/// One nonzero coefficient of a block combination.
template <class T>
struct Term {
    std::uint32_t row;
    std::uint32_t col;
    T coef;
    int unit;  // +1 or -1 when coef is exactly that value, else 0
};

/// Coefficients of one recursion level, rounded into the element type and
/// reduced to their nonzero entries in canonical (row outer, col inner)
/// order. Skipping zeros is exact: they contribute fl(0 * x) = 0 to a sum.
template <class T>
struct LevelCoefficients {
    std::size_t n = 0;
    std::size_t rank = 0;
    std::vector<std::vector<Term<T>>> u;  // per r: terms over A blocks
    std::vector<std::vector<Term<T>>> v;  // per r: terms over B blocks
    std::vector<std::vector<Term<T>>> w;  // per r: output blocks receiving w * M_r
};

/// Builds level coefficients from dense tensors given as (r, row, col) ->
/// value callables, evaluated in double and then rounded into the mode.
template <class T, class UFn, class VFn, class WFn>
LevelCoefficients<T> make_level(std::size_t n, std::size_t rank, UFn&& u, VFn&& v, WFn&& w, const ScalarMode& mode) {
    LevelCoefficients<T> lc;
    lc.n = n;
    lc.rank = rank;
    lc.u.resize(rank);
    lc.v.resize(rank);
    lc.w.resize(rank);
    auto push = [&](std::vector<Term<T>>& out, double x, std::size_t i, std::size_t j) {
        if (x == 0.0) return;
        const T coef = ScalarTraits<T>::from_double(x, mode);
        const double rounded = ScalarTraits<T>::to_double(coef);
        const int unit = rounded == 1.0 ? 1 : (rounded == -1.0 ? -1 : 0);
        out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), coef, unit});
    };
    for (std::size_t r = 0; r < rank; ++r)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                push(lc.u[r], u(r, i, j), i, j);
                push(lc.v[r], v(r, i, j), i, j);
                push(lc.w[r], w(r, i, j), i, j);
            }
    return lc;
}

template <class T>
LevelCoefficients<T> level_from_formula(const BilinearFormula& f, const ScalarMode& mode) {
    return make_level<T>(
        f.n(), f.rank(), [&](auto r, auto i, auto j) { return f.u(r, i, j); },
        [&](auto r, auto i, auto j) { return f.v(r, i, j); }, [&](auto r, auto i, auto j) { return f.w(r, i, j); },
        mode);
}

namespace detail {

inline void require_square_pair(std::size_t ar, std::size_t ac, std::size_t br, std::size_t bc) {
    if (ar != ac || br != bc || ar != br)
        throw std::invalid_argument("expected two square matrices of equal size, got " + std::to_string(ar) + "x" +
                                    std::to_string(ac) + " and " + std::to_string(br) + "x" + std::to_string(bc));
}

// out = fl(c * x), with c = +-1 short-circuited (both are exact).
template <class T>
inline T scale(const T& c, const T& x, int unit) {
    if (unit == 1) return x;
    if (unit == -1) return -x;
    return c * x;
}

}  // namespace detail

/// Classical product with c_ij = sum_k fl(a_ik * b_kj) accumulated in k
/// order. Rows are distributed over OpenMP threads; the per-entry summation
/// order does not depend on the schedule, so the result is bitwise identical
/// to reference::standard_multiply.
template <class T>
Matrix<T> standard_multiply(const Matrix<T>& a, const Matrix<T>& b, const ScalarMode& mode) {
    require_mode<T>(mode);
    if (a.cols() != b.rows())
        throw std::invalid_argument("dimension mismatch: " + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()));
    const std::size_t rows = a.rows();
    const std::size_t inner = a.cols();
    const std::size_t cols = b.cols();
    Matrix<T> c = zeros<T>(rows, cols, mode);
    const T* pa = a.data();
    const T* pb = b.data();
    T* pc = c.data();
    const auto work = static_cast<double>(rows) * static_cast<double>(inner) * static_cast<double>(cols);
    (void)work;
#pragma omp parallel for schedule(static) if (work > 1.0e6)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(rows); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        T* crow = pc + i * cols;
        for (std::size_t k = 0; k < inner; ++k) {
            const T aik = pa[i * inner + k];
            const T* brow = pb + k * cols;
            for (std::size_t j = 0; j < cols; ++j) crow[j] = crow[j] + aik * brow[j];
        }
    }
    return c;
}

namespace detail {

// sum over terms of coef * (block (row, col) of src), accumulated in term order.
template <class T>
Matrix<T> combine_blocks(const Matrix<T>& src, std::span<const Term<T>> terms, std::size_t m, const ScalarMode& mode) {
    Matrix<T> out = zeros<T>(m, m, mode);
    const std::size_t ld = src.cols();
    T* po = out.data();
    bool first = true;
    for (const Term<T>& t : terms) {
        const int unit = t.unit;
        const T* base = src.data() + t.row * m * ld + t.col * m;
        for (std::size_t i = 0; i < m; ++i) {
            const T* s = base + i * ld;
            T* o = po + i * m;
            if (first) {
                for (std::size_t j = 0; j < m; ++j) o[j] = scale(t.coef, s[j], unit);
            } else {
                for (std::size_t j = 0; j < m; ++j) o[j] = o[j] + scale(t.coef, s[j], unit);
            }
        }
        first = false;
    }
    return out;
}

template <class T>
void accumulate_output(Matrix<T>& c, const Matrix<T>& product, std::span<const Term<T>> terms, std::size_t m) {
    const std::size_t ld = c.cols();
    for (const Term<T>& t : terms) {
        const int unit = t.unit;
        T* base = c.data() + t.row * m * ld + t.col * m;
        for (std::size_t i = 0; i < m; ++i) {
            T* o = base + i * ld;
            const T* p = product.data() + i * m;
            for (std::size_t j = 0; j < m; ++j) o[j] = o[j] + scale(t.coef, p[j], unit);
        }
    }
}

// levels[q - 1] drives the block level that splits a size m * n^q problem.
template <class T>
Matrix<T> recurse(std::span<const LevelCoefficients<T>> levels, std::size_t depth, const Matrix<T>& a,
                  const Matrix<T>& b, const ScalarMode& mode, MultiplyStats* stats, bool parallel_terms) {
    if (depth == 0) {
        if (stats) stats->leaf_multiplies.fetch_add(1, std::memory_order_relaxed);
        return standard_multiply(a, b, mode);
    }
    const LevelCoefficients<T>& level = levels[depth - 1];
    const std::size_t size = a.rows();
    const std::size_t m = size / level.n;
    const std::size_t rank = level.rank;

    std::vector<Matrix<T>> products(rank);
    const bool go_parallel = parallel_terms && static_cast<double>(m) * m * m > 1.0e5;
    (void)go_parallel;
#pragma omp parallel for schedule(dynamic) if (go_parallel)
    for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(rank); ++rr) {
        const auto r = static_cast<std::size_t>(rr);
        const Matrix<T> ar = combine_blocks<T>(a, level.u[r], m, mode);
        const Matrix<T> br = combine_blocks<T>(b, level.v[r], m, mode);
        products[r] = recurse<T>(levels, depth - 1, ar, br, mode, stats, false);
    }
    Matrix<T> c = zeros<T>(size, size, mode);
    for (std::size_t r = 0; r < rank; ++r) accumulate_output<T>(c, products[r], level.w[r], m);
    return c;
}

inline std::size_t checked_block_size(std::size_t size, std::size_t n, std::size_t depth) {
    std::size_t block = 1;
    for (std::size_t q = 0; q < depth; ++q) block *= n;
    if (size == 0 || size % block != 0)
        throw std::invalid_argument("matrix size " + std::to_string(size) + " is not of the form m * " +
                                    std::to_string(n) + "^" + std::to_string(depth));
    return size / block;
}

}  // namespace detail

/// Runs the block recursion with explicit per-level coefficients. levels[0]
/// is the innermost level; levels.size() is the recursion depth.
template <class T>
Matrix<T> apply_levels(std::span<const LevelCoefficients<T>> levels, const Matrix<T>& a, const Matrix<T>& b,
                       const ScalarMode& mode, MultiplyStats* stats = nullptr) {
    require_mode<T>(mode);
    detail::require_square_pair(a.rows(), a.cols(), b.rows(), b.cols());
    std::size_t n = levels.empty() ? 1 : levels.front().n;
    detail::checked_block_size(a.rows(), n, levels.size());
    return detail::recurse<T>(levels, levels.size(), a, b, mode, stats, true);
}

/// One block level of f on mn x mn inputs.
template <class T>
Matrix<T> apply_bc(const BilinearFormula& f, const Matrix<T>& a, const Matrix<T>& b, const ScalarMode& mode,
                   MultiplyStats* stats = nullptr) {
    const std::vector<LevelCoefficients<T>> levels{level_from_formula<T>(f, mode)};
    return apply_levels<T>(levels, a, b, mode, stats);
}

/// Deterministic recursion F^(Q): Q block levels of f with the classical
/// product at the leaves. Q = 0 is standard_multiply.
template <class T>
Matrix<T> recursive_apply(const BilinearFormula& f, const Matrix<T>& a, const Matrix<T>& b, std::size_t depth,
                          const ScalarMode& mode, MultiplyStats* stats = nullptr) {
    const std::vector<LevelCoefficients<T>> levels(depth, level_from_formula<T>(f, mode));
    require_mode<T>(mode);
    detail::require_square_pair(a.rows(), a.cols(), b.rows(), b.cols());
    detail::checked_block_size(a.rows(), f.n(), depth);
    return detail::recurse<T>(std::span<const LevelCoefficients<T>>(levels), depth, a, b, mode, stats, true);
}

/// Smallest m * n^depth >= size.
std::size_t padded_size(std::size_t size, std::size_t n, std::size_t depth);

template <class T>
struct Padded {
    Matrix<T> matrix;
    std::size_t original_rows;
    std::size_t original_cols;
};

/// Zero-pads a square matrix to the smallest conforming size.
template <class T>
Padded<T> pad_to_shape(const Matrix<T>& a, std::size_t n, std::size_t depth, const ScalarMode& mode) {
    const std::size_t target = padded_size(std::max(a.rows(), a.cols()), n, depth);
    if (target == a.rows() && target == a.cols()) return {a, a.rows(), a.cols()};
    Matrix<T> out = zeros<T>(target, target, mode);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    return {std::move(out), a.rows(), a.cols()};
}

template <class T>
Matrix<T> unpad(const Matrix<T>& a, std::size_t rows, std::size_t cols) {
    if (rows > a.rows() || cols > a.cols()) throw std::invalid_argument("unpad target larger than matrix");
    if (rows == a.rows() && cols == a.cols()) return a;
    Matrix<T> out(rows, cols, a(0, 0));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) out(i, j) = a(i, j);
    return out;
}

/// Pads, runs recursive_apply, and crops back to the original size.
template <class T>
Matrix<T> recursive_apply_padded(const BilinearFormula& f, const Matrix<T>& a, const Matrix<T>& b, std::size_t depth,
                                 const ScalarMode& mode) {
    detail::require_square_pair(a.rows(), a.cols(), b.rows(), b.cols());
    const auto pa = pad_to_shape(a, f.n(), depth, mode);
    const auto pb = pad_to_shape(b, f.n(), depth, mode);
    return unpad(recursive_apply(f, pa.matrix, pb.matrix, depth, mode), a.rows(), b.cols());
}

namespace reference {

/// Serial i-j-k classical product with the same per-entry summation order as
/// randbc::standard_multiply. Kept for testing and benchmarking.
template <class T>
Matrix<T> standard_multiply(const Matrix<T>& a, const Matrix<T>& b, const ScalarMode& mode) {
    require_mode<T>(mode);
    if (a.cols() != b.rows()) throw std::invalid_argument("dimension mismatch");
    Matrix<T> c = zeros<T>(a.rows(), b.cols(), mode);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            T acc = ScalarTraits<T>::zero(mode);
            for (std::size_t k = 0; k < a.cols(); ++k) acc = acc + a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    return c;
}

}  // namespace reference

}  // namespace randbc
