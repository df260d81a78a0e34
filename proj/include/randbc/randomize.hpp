#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "randbc/formula.hpp"
#include "randbc/matrix.hpp"
#include "randbc/multiply.hpp"
#include "randbc/rng.hpp"

namespace randbc {

/// Three Rademacher sign vectors and three permutations of the block grid.
/// perms[i][j] is pi_i(j), 0-based. Defines M_i = P_i S_i, where S_i scales
/// block j by signs[i][j] and P_i moves block j to position pi_i(j).
struct RandomizationPlan {
    std::size_t n = 0;
    std::array<std::vector<int>, 3> signs;
    std::array<std::vector<std::size_t>, 3> perms;

    static RandomizationPlan identity(std::size_t n);

    /// Throws std::invalid_argument unless signs are +-1 and perms are bijections.
    void validate() const;

    bool is_identity() const;

    friend bool operator==(const RandomizationPlan&, const RandomizationPlan&) = default;
};

/// One independent plan per recursion level; levels[q - 1] is level q, and
/// level Q (the last entry) acts on the full-size matrices.
struct RecursivePlan {
    std::vector<RandomizationPlan> levels;

    std::size_t depth() const noexcept { return levels.size(); }
};

/// Uniform plan: three sign vectors (n coin flips each), then three
/// Fisher-Yates permutations, all from `rng`.
RandomizationPlan draw_plan(std::size_t n, Philox4x32& rng);

/// Level q of trial `trial` is drawn from substream (seed, trial, q, plan).
RecursivePlan draw_recursive_plan(std::size_t n, std::size_t depth, std::uint64_t seed, std::uint64_t trial);

enum class Variant { full, sign_only, perm_only, none };

Variant parse_variant(std::string_view text);
std::string_view variant_name(Variant v);

/// Replaces the suppressed component by the identity: sign_only keeps the
/// signs, perm_only keeps the permutations, none returns the identity plan.
RandomizationPlan variant_plan(const RandomizationPlan& plan, Variant variant);
RecursivePlan variant_plan(const RecursivePlan& plan, Variant variant);

/// Explicit M_i = P_i S_i for block size m (which in {0, 1, 2}).
Matrix<double> orthogonal_factor(const RandomizationPlan& plan, std::size_t which, std::size_t block);

/// Number of distinct plans, (2^n)^3 (n!)^3, saturating at UINT64_MAX.
std::uint64_t plan_count(std::size_t n);

/// Calls fn(plan) for every plan, in a fixed order.
template <class Fn>
void for_each_plan(std::size_t n, Fn&& fn);

struct RandomizeOptions {
    /// Fold (1 - kappa)^-1 into the output coefficients.
    bool kappa_rescale = true;
};

/// Rescaling factor (1 - kappa)^-1; throws std::domain_error if kappa == 1.
double kappa_factor(const BilinearFormula& f);

/// Hatted coefficients of one level:
///   u^_klr  = u_{pi1(k) pi2(l) r} s1(k) s2(l)
///   v^_k'l'r = v_{pi2(k') pi3(l') r} s2(k') s3(l')
///   w^_ijr  = (1 - kappa)^-1 s1(i) s3(j) w_{pi1(i) pi3(j) r}
/// with the factor applied in double before rounding into T.
template <class T>
LevelCoefficients<T> randomized_level(const BilinearFormula& f, const RandomizationPlan& plan, double factor,
                                      const ScalarMode& mode) {
    if (plan.n != f.n()) throw std::invalid_argument("plan grid size does not match formula");
    const auto& s = plan.signs;
    const auto& p = plan.perms;
    return make_level<T>(
        f.n(), f.rank(),
        [&](std::size_t r, std::size_t k, std::size_t l) {
            return f.u(r, p[0][k], p[1][l]) * static_cast<double>(s[0][k] * s[1][l]);
        },
        [&](std::size_t r, std::size_t k, std::size_t l) {
            return f.v(r, p[1][k], p[2][l]) * static_cast<double>(s[1][k] * s[2][l]);
        },
        [&](std::size_t r, std::size_t i, std::size_t j) {
            return factor * (f.w(r, p[0][i], p[2][j]) * static_cast<double>(s[0][i] * s[2][j]));
        },
        mode);
}

/// f^(A, B) = (1 - kappa)^-1 M1^T f(M1 A M2^T, M2 B M3^T) M3, evaluated as a
/// single block level with hatted coefficients.
template <class T>
Matrix<T> randomized_apply(const BilinearFormula& f, const RandomizationPlan& plan, const Matrix<T>& a,
                           const Matrix<T>& b, const ScalarMode& mode, RandomizeOptions options = {}) {
    const double factor = options.kappa_rescale ? kappa_factor(f) : 1.0;
    const std::vector<LevelCoefficients<T>> levels{randomized_level<T>(f, plan, factor, mode)};
    return apply_levels<T>(levels, a, b, mode);
}

/// F^(Q) with level q randomized by rplan.levels[q - 1]; the factor
/// (1 - kappa)^-1 enters once per level.
template <class T>
Matrix<T> recursive_randomized_apply(const BilinearFormula& f, const RecursivePlan& rplan, const Matrix<T>& a,
                                     const Matrix<T>& b, const ScalarMode& mode, RandomizeOptions options = {},
                                     MultiplyStats* stats = nullptr) {
    const double factor = options.kappa_rescale ? kappa_factor(f) : 1.0;
    std::vector<LevelCoefficients<T>> levels;
    levels.reserve(rplan.depth());
    for (const RandomizationPlan& plan : rplan.levels) levels.push_back(randomized_level<T>(f, plan, factor, mode));
    return apply_levels<T>(levels, a, b, mode, stats);
}

inline constexpr std::uint64_t kMaxEnumeratedPlans = 1'000'000;

/// Exact mean of f^(A, B) over all plans, each evaluated in `mode` and
/// averaged in double. Throws std::length_error above kMaxEnumeratedPlans.
template <class T>
Matrix<double> enumerate_expectation(const BilinearFormula& f, const Matrix<T>& a, const Matrix<T>& b,
                                     const ScalarMode& mode) {
    const std::uint64_t count = plan_count(f.n());
    if (count > kMaxEnumeratedPlans) throw std::length_error("too many plans to enumerate");
    const double factor = kappa_factor(f);
    Matrix<double> sum(a.rows(), b.cols(), 0.0);
    for_each_plan(f.n(), [&](const RandomizationPlan& plan) {
        const std::vector<LevelCoefficients<T>> levels{randomized_level<T>(f, plan, factor, mode)};
        const Matrix<T> c = apply_levels<T>(levels, a, b, mode);
        for (std::size_t i = 0; i < sum.size(); ++i) sum.data()[i] += ScalarTraits<T>::to_double(c.data()[i]);
    });
    for (double& x : sum.values()) x /= static_cast<double>(count);
    return sum;
}

// ---------------------------------------------------------------------------

template <class Fn>
void for_each_plan(std::size_t n, Fn&& fn) {
    std::vector<std::vector<int>> sign_vectors;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        std::vector<int> s(n);
        for (std::size_t j = 0; j < n; ++j) s[j] = (bits >> j) & 1u ? -1 : 1;
        sign_vectors.push_back(std::move(s));
    }
    std::vector<std::vector<std::size_t>> permutations;
    std::vector<std::size_t> perm(n);
    for (std::size_t j = 0; j < n; ++j) perm[j] = j;
    do {
        permutations.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));

    RandomizationPlan plan;
    plan.n = n;
    for (const auto& s0 : sign_vectors)
        for (const auto& s1 : sign_vectors)
            for (const auto& s2 : sign_vectors)
                for (const auto& p0 : permutations)
                    for (const auto& p1 : permutations)
                        for (const auto& p2 : permutations) {
                            plan.signs = {s0, s1, s2};
                            plan.perms = {p0, p1, p2};
                            fn(static_cast<const RandomizationPlan&>(plan));
                        }
}

}  // namespace randbc
