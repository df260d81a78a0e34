#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "randbc/formula.hpp"
#include "randbc/matrix.hpp"
#include "randbc/precision.hpp"
#include "randbc/randomize.hpp"

namespace randbc {

/// One evaluated bound, optionally paired with the error it should dominate.
struct BoundReport {
    std::string bound_name;
    bool hypothesis_ok = true;
    double bound_value = 0.0;
    std::optional<double> empirical_value;
    double mu = 0.0;
    double threshold = 0.0;  // hypothesis threshold applied, 0 when none

    /// True unless the hypothesis holds and the empirical value exceeds the bound.
    bool dominated() const noexcept {
        return !hypothesis_ok || !empirical_value || *empirical_value <= bound_value;
    }
};

/// ||A|| ||B|| ||Y - X||.
double bound_deterministic(const BilinearFormula& f, double norm_a, double norm_b);

/// ||A|| ||B|| ||(1 - kappa)^-1 Y - X||. Throws std::domain_error if kappa == 1.
double bound_randomized(const BilinearFormula& f, double norm_a, double norm_b);

struct SupConstant {
    double constant = 0.0;  // |eta| mu^2 ||Y||
    double cap = 0.0;       // 2 mu^2 (n^-5/2 ||Y - X|| + n^-1) ||Y - X||
    bool hypothesis_ok = true;  // |kappa| <= 1/2
};

SupConstant bound_sup_constant(const BilinearFormula& f, double mu);

enum class NumericalBound { scalar_p5, block_p6, randomized_p7, total_det_p8, total_rand_p9 };

std::string_view numerical_bound_name(NumericalBound which);
NumericalBound parse_numerical_bound(std::string_view text);

inline constexpr double kDefaultHypothesisThreshold = 0.01;

/// Growth factor of the rounding-error bound: 4n + R - 1 for the scalar case
/// (block must be 1), 4n + m + R - 2 otherwise.
double numerical_factor(const BilinearFormula& f, std::size_t block, NumericalBound which);

/// 1.01 * factor * sqrt(R) * eps * ||A|| ||B|| * weight_norm_product(f), times
/// (1 - kappa)^-1 for the randomized variants and plus ||A|| ||B|| ||Y - X||
/// for the deterministic total. The hypothesis is factor * eps <= threshold.
BoundReport bound_numerical(const BilinearFormula& f, double norm_a, double norm_b, std::size_t block,
                            double epsilon, NumericalBound which,
                            double threshold = kDefaultHypothesisThreshold);

/// Coefficient c in "second randomized term <= c ||A|| ||B|| ||Y - X||", from
/// |kappa| <= n^-5/2 ||Y - X||: weight * 1.01 * (4n + m + R - 2) * sqrt(R) * eps / n^(5/2).
double randomized_excess_coefficient(std::size_t n, std::size_t rank, std::size_t block, double epsilon,
                                     double weight_norm);

struct BoundTableOptions {
    double threshold = kDefaultHypothesisThreshold;
    /// Enumerate all plans for the expectation bound when feasible.
    bool enumerate_expectation = true;
};

/// Every bound for one (f, A, B, plan) in the given mode, each paired with
/// its measured error. "Exact" values are computed in double.
std::vector<BoundReport> bound_table(const BilinearFormula& f, const Matrix<double>& a, const Matrix<double>& b,
                                     const RandomizationPlan& plan, const ScalarMode& mode,
                                     const BoundTableOptions& options = {});

/// CSV with header bound,hypothesis_ok,bound_value,empirical_value,mu,threshold.
std::string bound_table_csv(const std::vector<BoundReport>& rows);

}  // namespace randbc
