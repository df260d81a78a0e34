#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "randbc/bounds.hpp"
#include "randbc/rng.hpp"

using namespace randbc;

namespace {

BilinearFormula perturbed(std::uint64_t seed, double sigma = 1e-3) {
    Philox4x32 rng = substream(seed, 0, 0, StreamRole::formula);
    return perturb(strassen_formula(), sigma, 5, rng);
}

const BoundReport& row(const std::vector<BoundReport>& rows, std::string_view name) {
    for (const BoundReport& r : rows)
        if (r.bound_name == name) return r;
    throw std::runtime_error("missing row " + std::string(name));
}

}  // namespace

TEST_CASE("error-free bounds: exact formulas and homogeneity") {
    const BilinearFormula s = strassen_formula();
    CHECK(bound_deterministic(s, 3.0, 4.0) == 0.0);
    CHECK(bound_randomized(s, 3.0, 4.0) == 0.0);
    const BilinearFormula f = perturbed(1);
    CHECK(bound_deterministic(f, 2.0, 1.5) == doctest::Approx(2.0 * bound_deterministic(f, 1.0, 1.5)));
    CHECK(bound_randomized(f, 2.0, 3.0) == doctest::Approx(6.0 * bound_randomized(f, 1.0, 1.0)));
    CHECK(bound_deterministic(f, 1.0, 1.0) == doctest::Approx(oracle::residual(f)).epsilon(1e-13));
    CHECK(bound_randomized(f, 1.0, 1.0) ==
          doctest::Approx(oracle::residual(f, 1.0 / (1.0 - oracle::kappa(f)))).epsilon(1e-12));
}

TEST_CASE("kappa -> 0: randomized and deterministic bounds differ by at most 2|kappa| ||Y||") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const BilinearFormula f = perturbed(seed, 0.01);
        const double k = kappa(f);
        REQUIRE(std::fabs(k) <= 0.5);
        CHECK(std::fabs(bound_randomized(f, 1, 1) - bound_deterministic(f, 1, 1)) <= 2 * std::fabs(k) * y_norm(f));
    }
}

TEST_CASE("error-free bounds dominate Monte-Carlo errors") {
    const BilinearFormula f = perturbed(42);
    Philox4x32 rng(5);
    int det_ok = 0, rand_ok = 0;
    for (int t = 0; t < 1000; ++t) {
        const Matrix<double> a = oracle::gaussian(4, rng), b = oracle::gaussian(4, rng);
        const Matrix<double> ab = oracle::matmul(a, b);
        const double na = oracle::frob(a), nb = oracle::frob(b);
        det_ok += oracle::dist(apply_bc(f, a, b, ScalarMode::f64()), ab) <= bound_deterministic(f, na, nb);
        const RandomizationPlan plan = draw_plan(2, rng);
        rand_ok += oracle::dist(randomized_apply(f, plan, a, b, ScalarMode::f64()), ab) <= bound_randomized(f, na, nb);
    }
    CHECK(det_ok == 1000);
    CHECK(rand_ok == 1000);
}

TEST_CASE("sup constant and its cap") {
    const SupConstant exact = bound_sup_constant(strassen_formula(), 1.0);
    CHECK(exact.constant == 0.0);
    CHECK(exact.cap == 0.0);
    CHECK(exact.hypothesis_ok);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SupConstant s = bound_sup_constant(perturbed(seed), 1.0);
        CHECK(s.hypothesis_ok);
        CHECK(s.constant <= s.cap);
        const SupConstant s2 = bound_sup_constant(perturbed(seed), 2.0);
        CHECK(s2.cap == doctest::Approx(4.0 * s.cap));
    }
    // n = 3 with ||Y - X|| < 3^(3/2) / 2: the cap beats mu^2 ||Y - X||.
    Philox4x32 rng(8);
    const BilinearFormula g = perturb(standard_formula(3), 0.05, 5, rng);
    const double res = residual_norm(g);
    REQUIRE(res < std::pow(3.0, 1.5) / 2.0);
    const SupConstant s = bound_sup_constant(g, 1.5);
    CHECK(s.cap < 1.5 * 1.5 * res);
    CHECK(s.constant <= s.cap);
}

TEST_CASE("numerical bound formulas") {
    const BilinearFormula s = strassen_formula();
    CHECK(numerical_factor(s, 1, NumericalBound::scalar_p5) == 14.0);
    CHECK(numerical_factor(s, 5, NumericalBound::block_p6) == 18.0);
    CHECK_THROWS_AS(numerical_factor(s, 2, NumericalBound::scalar_p5), std::invalid_argument);

    const BoundReport p6 = bound_numerical(s, 2.0, 3.0, 4, 1e-8, NumericalBound::block_p6);
    CHECK(p6.bound_value == doctest::Approx(1.01 * 17 * std::sqrt(7.0) * 1e-8 * 6.0 * std::sqrt(32.0)));
    CHECK(p6.hypothesis_ok);
    CHECK(p6.threshold == 0.01);

    for (auto which : {NumericalBound::scalar_p5, NumericalBound::block_p6, NumericalBound::randomized_p7,
                       NumericalBound::total_det_p8, NumericalBound::total_rand_p9}) {
        CHECK(bound_numerical(s, 1.0, 1.0, 1, 0.0, which).bound_value == 0.0);
        CHECK(parse_numerical_bound(numerical_bound_name(which)) == which);
        const BilinearFormula f = perturbed(3);
        CHECK(bound_numerical(f, 2.0, 1.0, 1, 1e-7, which).bound_value ==
              doctest::Approx(2.0 * bound_numerical(f, 1.0, 1.0, 1, 1e-7, which).bound_value));
    }
    // Exact formula: randomized variants coincide with the deterministic ones.
    CHECK(bound_numerical(s, 1, 1, 8, 1e-7, NumericalBound::total_rand_p9).bound_value ==
          bound_numerical(s, 1, 1, 8, 1e-7, NumericalBound::block_p6).bound_value);
    const BilinearFormula f = perturbed(4);
    CHECK(bound_numerical(f, 1, 1, 8, 1e-7, NumericalBound::total_det_p8).bound_value ==
          doctest::Approx(bound_numerical(f, 1, 1, 8, 1e-7, NumericalBound::block_p6).bound_value +
                          bound_deterministic(f, 1, 1)));
    CHECK(bound_numerical(f, 1, 1, 8, 1e-7, NumericalBound::randomized_p7).bound_value ==
          doctest::Approx(kappa_factor(f) * bound_numerical(f, 1, 1, 8, 1e-7, NumericalBound::block_p6).bound_value));
    // Hypothesis failure is reported, not thrown.
    CHECK_FALSE(bound_numerical(s, 1, 1, 1, 0.05, NumericalBound::scalar_p5).hypothesis_ok);
    CHECK(bound_numerical(s, 1, 1, 1, 0.05, NumericalBound::scalar_p5, 1.01).hypothesis_ok);
}

TEST_CASE("second-example excess coefficient") {
    const double c = randomized_excess_coefficient(2, 7, 50000, 1e-8, 10.0);
    CHECK(c == doctest::Approx(0.0024).epsilon(0.02));
    CHECK(c == doctest::Approx(10 * 1.01 * 50013 * std::sqrt(7.0) * 1e-8 / std::pow(2.0, 2.5)));
}

TEST_CASE("single precision block bound dominates in 1000 of 1000 trials") {
    const BilinearFormula s = strassen_formula();
    Philox4x32 rng(12);
    BoundTableOptions options;
    options.enumerate_expectation = false;
    int ok = 0;
    for (int t = 0; t < 1000; ++t) {
        const Matrix<double> a = oracle::gaussian(8, rng), b = oracle::gaussian(8, rng);
        const auto rows = bound_table(s, a, b, draw_plan(2, rng), ScalarMode::f32(), options);
        const BoundReport& block = row(rows, "block");
        REQUIRE(block.hypothesis_ok);
        REQUIRE(block.empirical_value);
        ok += *block.empirical_value <= block.bound_value;
    }
    CHECK(ok == 1000);
}

TEST_CASE("bound table: every row dominated for a perturbed formula") {
    const BilinearFormula f = perturbed(42);
    Philox4x32 rng(13);
    for (int t = 0; t < 20; ++t) {
        const Matrix<double> a = oracle::gaussian(4, rng), b = oracle::gaussian(4, rng);
        for (const char* mode : {"f32", "f64"}) {
            const auto rows = bound_table(f, a, b, draw_plan(2, rng), ScalarMode::parse(mode));
            CHECK(rows.size() == 7);
            for (const BoundReport& r : rows) {
                INFO(r.bound_name << " " << mode);
                CHECK(r.empirical_value.has_value());
                CHECK(r.dominated());
            }
        }
    }
    const std::string csv = bound_table_csv(bound_table(f, Matrix<double>(2, 2, 1.0), Matrix<double>(2, 2, 1.0),
                                                        RandomizationPlan::identity(2), ScalarMode::f32()));
    CHECK(csv.rfind("bound,hypothesis_ok,bound_value,empirical_value,mu,threshold\n", 0) == 0);
    CHECK(csv.find("\nscalar,1,") != std::string::npos);
}
