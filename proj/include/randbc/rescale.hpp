#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "randbc/formula.hpp"
#include "randbc/matrix.hpp"
#include "randbc/multiply.hpp"
#include "randbc/precision.hpp"

namespace randbc {

enum class ScalingStep { outside, inside };
using ScalingSchedule = std::vector<ScalingStep>;

/// Outside, inside, outside, inside.
ScalingSchedule default_schedule();

/// Parses a string of 'O' / 'I' letters (case-insensitive), e.g. "OIOI".
ScalingSchedule parse_schedule(std::string_view text);
std::string schedule_name(const ScalingSchedule& schedule);

/// A zero row of A or zero column of B makes a scaling factor zero.
class DegenerateInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

template <class T>
T max_abs_along(const Matrix<T>& a, std::size_t fixed, bool by_row) {
    const std::size_t count = by_row ? a.cols() : a.rows();
    T best = ScalarTraits<T>::abs(by_row ? a(fixed, 0) : a(0, fixed));
    double best_d = ScalarTraits<T>::to_double(best);
    for (std::size_t k = 1; k < count; ++k) {
        const T v = ScalarTraits<T>::abs(by_row ? a(fixed, k) : a(k, fixed));
        const double vd = ScalarTraits<T>::to_double(v);
        if (vd > best_d) {
            best = v;
            best_d = vd;
        }
    }
    return best;
}

}  // namespace detail

/// max_j |a_ij| for each row i.
template <class T>
std::vector<T> row_max_abs(const Matrix<T>& a) {
    std::vector<T> out;
    out.reserve(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) out.push_back(detail::max_abs_along(a, i, true));
    return out;
}

/// max_i |a_ij| for each column j.
template <class T>
std::vector<T> col_max_abs(const Matrix<T>& a) {
    std::vector<T> out;
    out.reserve(a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) out.push_back(detail::max_abs_along(a, j, false));
    return out;
}

template <class T>
struct OutsideFactors {
    std::vector<T> d_a;  // row maxima of |A|
    std::vector<T> d_b;  // column maxima of |B|
};

/// D_A and D_B of outside scaling. Throws DegenerateInputError on a zero entry.
template <class T>
OutsideFactors<T> outside_factors(const Matrix<T>& a, const Matrix<T>& b) {
    OutsideFactors<T> out{row_max_abs(a), col_max_abs(b)};
    for (const T& x : out.d_a)
        if (ScalarTraits<T>::to_double(x) == 0.0) throw DegenerateInputError("outside scaling: A has a zero row");
    for (const T& x : out.d_b)
        if (ScalarTraits<T>::to_double(x) == 0.0) throw DegenerateInputError("outside scaling: B has a zero column");
    return out;
}

/// D_kk = sqrt(max_j |b_kj| / max_i |a_ik|), with the quotient formed as a
/// product with the rounded reciprocal.
template <class T>
std::vector<T> inside_factors(const Matrix<T>& a, const Matrix<T>& b, const ScalarMode& mode) {
    const std::vector<T> a_cols = col_max_abs(a);
    const std::vector<T> b_rows = row_max_abs(b);
    const T one = ScalarTraits<T>::from_double(1.0, mode);
    std::vector<T> d;
    d.reserve(a_cols.size());
    for (std::size_t k = 0; k < a_cols.size(); ++k) {
        if (ScalarTraits<T>::to_double(a_cols[k]) == 0.0)
            throw DegenerateInputError("inside scaling: A has a zero column");
        if (ScalarTraits<T>::to_double(b_rows[k]) == 0.0)
            throw DegenerateInputError("inside scaling: B has a zero row");
        d.push_back(ScalarTraits<T>::sqrt(b_rows[k] * (one / a_cols[k])));
    }
    return d;
}

/// Scaling steps applied in order, then deterministic recursive_apply of f,
/// then the accumulated outside factors undone:
///   outside: A <- D_A^-1 A, B <- B D_B^-1 (C is later multiplied back)
///   inside:  A <- A D,      B <- D^-1 B
/// All factors live in the mode; divisions are products with rounded
/// reciprocals. An empty schedule is exactly recursive_apply.
template <class T>
Matrix<T> rescaled_multiply(const BilinearFormula& f, const Matrix<T>& a, const Matrix<T>& b, std::size_t depth,
                            const ScalingSchedule& schedule, const ScalarMode& mode, MultiplyStats* stats = nullptr) {
    require_mode<T>(mode);
    detail::require_square_pair(a.rows(), a.cols(), b.rows(), b.cols());
    if (schedule.empty()) return recursive_apply(f, a, b, depth, mode, stats);
    const std::size_t n = a.rows();
    const T one = ScalarTraits<T>::from_double(1.0, mode);
    Matrix<T> as = a;
    Matrix<T> bs = b;
    std::vector<T> left;   // accumulated D_A
    std::vector<T> right;  // accumulated D_B
    for (ScalingStep step : schedule) {
        if (step == ScalingStep::outside) {
            const OutsideFactors<T> of = outside_factors(as, bs);
            for (std::size_t i = 0; i < n; ++i) {
                const T r = one / of.d_a[i];
                for (std::size_t j = 0; j < n; ++j) as(i, j) = r * as(i, j);
            }
            for (std::size_t j = 0; j < n; ++j) {
                const T r = one / of.d_b[j];
                for (std::size_t i = 0; i < n; ++i) bs(i, j) = bs(i, j) * r;
            }
            if (left.empty()) {
                left = of.d_a;
                right = of.d_b;
            } else {
                for (std::size_t i = 0; i < n; ++i) left[i] = left[i] * of.d_a[i];
                for (std::size_t j = 0; j < n; ++j) right[j] = right[j] * of.d_b[j];
            }
        } else {
            const std::vector<T> d = inside_factors(as, bs, mode);
            for (std::size_t k = 0; k < n; ++k) {
                const T r = one / d[k];
                for (std::size_t i = 0; i < n; ++i) as(i, k) = as(i, k) * d[k];
                for (std::size_t j = 0; j < n; ++j) bs(k, j) = r * bs(k, j);
            }
        }
    }
    Matrix<T> c = recursive_apply(f, as, bs, depth, mode, stats);
    if (!left.empty())
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) c(i, j) = (left[i] * c(i, j)) * right[j];
    return c;
}

}  // namespace randbc
