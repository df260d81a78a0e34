#include "randbc/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "randbc/multiply.hpp"

namespace randbc {

double bound_deterministic(const BilinearFormula& f, double norm_a, double norm_b) {
    return norm_a * norm_b * residual_norm(f);
}

double bound_randomized(const BilinearFormula& f, double norm_a, double norm_b) {
    return norm_a * norm_b * scaled_residual_norm(f, kappa_factor(f));
}

SupConstant bound_sup_constant(const BilinearFormula& f, double mu) {
    const FormulaDiagnostics d = diagnose(f);
    const double n = static_cast<double>(f.n());
    SupConstant out;
    out.hypothesis_ok = std::fabs(d.kappa) <= 0.5;
    out.constant = std::fabs(d.eta) * mu * mu * d.y_norm;
    out.cap = 2.0 * mu * mu * (std::pow(n, -2.5) * d.residual_norm + 1.0 / n) * d.residual_norm;
    return out;
}

std::string_view numerical_bound_name(NumericalBound which) {
    switch (which) {
        case NumericalBound::scalar_p5:
            return "scalar";
        case NumericalBound::block_p6:
            return "block";
        case NumericalBound::randomized_p7:
            return "block_randomized";
        case NumericalBound::total_det_p8:
            return "total";
        case NumericalBound::total_rand_p9:
            return "total_randomized";
    }
    return "?";
}

NumericalBound parse_numerical_bound(std::string_view text) {
    for (auto which : {NumericalBound::scalar_p5, NumericalBound::block_p6, NumericalBound::randomized_p7,
                       NumericalBound::total_det_p8, NumericalBound::total_rand_p9})
        if (text == numerical_bound_name(which)) return which;
    throw std::invalid_argument("unknown numerical bound '" + std::string(text) + "'");
}

double numerical_factor(const BilinearFormula& f, std::size_t block, NumericalBound which) {
    const auto n = static_cast<double>(f.n());
    const auto rank = static_cast<double>(f.rank());
    if (which == NumericalBound::scalar_p5) {
        if (block != 1) throw std::invalid_argument("the scalar bound needs block size 1");
        return 4.0 * n + rank - 1.0;
    }
    if (block == 0) throw std::invalid_argument("block size must be positive");
    return 4.0 * n + static_cast<double>(block) + rank - 2.0;
}

BoundReport bound_numerical(const BilinearFormula& f, double norm_a, double norm_b, std::size_t block,
                            double epsilon, NumericalBound which, double threshold) {
    const double factor = numerical_factor(f, block, which);
    BoundReport report;
    report.bound_name = std::string(numerical_bound_name(which));
    report.threshold = threshold;
    report.hypothesis_ok = factor * epsilon <= threshold;
    double value = 1.01 * factor * std::sqrt(static_cast<double>(f.rank())) * epsilon * norm_a * norm_b *
                   weight_norm_product(f);
    switch (which) {
        case NumericalBound::scalar_p5:
        case NumericalBound::block_p6:
            break;
        case NumericalBound::randomized_p7:
        case NumericalBound::total_rand_p9:
            value *= kappa_factor(f);
            break;
        case NumericalBound::total_det_p8:
            value += bound_deterministic(f, norm_a, norm_b);
            break;
    }
    report.bound_value = value;
    return report;
}

double randomized_excess_coefficient(std::size_t n, std::size_t rank, std::size_t block, double epsilon,
                                     double weight_norm) {
    const auto nd = static_cast<double>(n);
    const double factor = 4.0 * nd + static_cast<double>(block) + static_cast<double>(rank) - 2.0;
    return weight_norm * 1.01 * factor * std::sqrt(static_cast<double>(rank)) * epsilon / std::pow(nd, 2.5);
}

namespace {

/// The same level with its stored (rounded) coefficients widened to double.
template <class T>
LevelCoefficients<double> widen(const LevelCoefficients<T>& lc) {
    LevelCoefficients<double> out;
    out.n = lc.n;
    out.rank = lc.rank;
    auto copy = [](const std::vector<std::vector<Term<T>>>& src, std::vector<std::vector<Term<double>>>& dst) {
        dst.resize(src.size());
        for (std::size_t r = 0; r < src.size(); ++r)
            for (const Term<T>& t : src[r]) dst[r].push_back({t.row, t.col, ScalarTraits<T>::to_double(t.coef), t.unit});
    };
    copy(lc.u, out.u);
    copy(lc.v, out.v);
    copy(lc.w, out.w);
    return out;
}

template <class T>
std::vector<BoundReport> bound_table_impl(const BilinearFormula& f, const Matrix<double>& a, const Matrix<double>& b,
                                          const RandomizationPlan& plan, const ScalarMode& mode,
                                          const BoundTableOptions& options) {
    const ScalarMode exact = ScalarMode::f64();
    const Matrix<T> am = to_mode<T>(a, mode);
    const Matrix<T> bm = to_mode<T>(b, mode);
    // The bounds assume stored inputs, so measure against the rounded ones.
    const Matrix<double> ad = to_double(am);
    const Matrix<double> bd = to_double(bm);
    const double norm_a = frobenius_norm(ad);
    const double norm_b = frobenius_norm(bd);
    const double mu = std::max(norm_a, norm_b);
    const std::size_t block = a.rows() / f.n();

    const Matrix<double> ab = standard_multiply(ad, bd, exact);
    const Matrix<double> f_exact = apply_bc(f, ad, bd, exact);
    const Matrix<double> fhat_exact = randomized_apply(f, plan, ad, bd, exact);
    const LevelCoefficients<T> level = level_from_formula<T>(f, mode);
    const LevelCoefficients<T> level_hat = randomized_level<T>(f, plan, kappa_factor(f), mode);
    const Matrix<T> f_fl = apply_levels<T>(std::span(&level, 1), am, bm, mode);
    const Matrix<T> fhat_fl = apply_levels<T>(std::span(&level_hat, 1), am, bm, mode);
    // Rounding-error bounds compare against exact arithmetic on the stored
    // coefficients, so coefficient representation error is not counted.
    const LevelCoefficients<double> stored = widen(level);
    const LevelCoefficients<double> stored_hat = widen(level_hat);
    const Matrix<double> f_stored = apply_levels<double>(std::span(&stored, 1), ad, bd, exact);
    const Matrix<double> fhat_stored = apply_levels<double>(std::span(&stored_hat, 1), ad, bd, exact);

    std::vector<BoundReport> rows;
    auto add = [&](BoundReport r, std::optional<double> empirical) {
        r.mu = mu;
        r.empirical_value = empirical;
        rows.push_back(std::move(r));
    };

    add({"deterministic", true, bound_deterministic(f, norm_a, norm_b), {}, 0.0, 0.0},
        frobenius_distance(f_exact, ab));
    add({"randomized", true, bound_randomized(f, norm_a, norm_b), {}, 0.0, 0.0}, frobenius_distance(fhat_exact, ab));
    const SupConstant sup = bound_sup_constant(f, mu);
    add({"sup_constant", sup.hypothesis_ok, sup.cap, {}, 0.0, 0.5}, sup.constant);

    const double eps = mode.epsilon();
    if (block == 1)
        add(bound_numerical(f, norm_a, norm_b, block, eps, NumericalBound::scalar_p5, options.threshold),
            frobenius_distance(f_fl, f_stored));
    add(bound_numerical(f, norm_a, norm_b, block, eps, NumericalBound::block_p6, options.threshold),
        frobenius_distance(f_fl, f_stored));
    add(bound_numerical(f, norm_a, norm_b, block, eps, NumericalBound::randomized_p7, options.threshold),
        frobenius_distance(fhat_fl, fhat_stored));
    add(bound_numerical(f, norm_a, norm_b, block, eps, NumericalBound::total_det_p8, options.threshold),
        frobenius_distance(f_fl, ab));
    std::optional<double> expectation_error;
    if (options.enumerate_expectation && plan_count(f.n()) <= kMaxEnumeratedPlans)
        expectation_error = frobenius_distance(enumerate_expectation<T>(f, am, bm, mode), ab);
    add(bound_numerical(f, norm_a, norm_b, block, eps, NumericalBound::total_rand_p9, options.threshold),
        expectation_error);
    return rows;
}

}  // namespace

std::vector<BoundReport> bound_table(const BilinearFormula& f, const Matrix<double>& a, const Matrix<double>& b,
                                     const RandomizationPlan& plan, const ScalarMode& mode,
                                     const BoundTableOptions& options) {
    if (a.rows() % f.n() != 0) throw std::invalid_argument("matrix size must be a multiple of the formula grid");
    return dispatch_scalar(mode, [&]<class T>() { return bound_table_impl<T>(f, a, b, plan, mode, options); });
}

std::string bound_table_csv(const std::vector<BoundReport>& rows) {
    std::string out = "bound,hypothesis_ok,bound_value,empirical_value,mu,threshold\n";
    char buf[256];
    for (const BoundReport& r : rows) {
        std::string empirical;
        if (r.empirical_value) {
            std::snprintf(buf, sizeof buf, "%.17g", *r.empirical_value);
            empirical = buf;
        }
        std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%s,%.17g,%.17g\n", r.bound_name.c_str(),
                      r.hypothesis_ok ? 1 : 0, r.bound_value, empirical.c_str(), r.mu, r.threshold);
        out += buf;
    }
    return out;
}

}  // namespace randbc
