#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "randbc/matgen.hpp"
#include "randbc/rescale.hpp"

using namespace randbc;

namespace {

Matrix<double> gaussian(std::size_t n, std::uint64_t seed) {
    Philox4x32 rng(seed);
    return oracle::gaussian(n, rng);
}

double rel(const Matrix<double>& x, const Matrix<double>& ref) { return oracle::dist(x, ref) / oracle::frob(ref); }

}  // namespace

TEST_CASE("schedules") {
    const ScalingSchedule d = default_schedule();
    REQUIRE(d.size() == 4);
    CHECK(d[0] == ScalingStep::outside);
    CHECK(d[1] == ScalingStep::inside);
    CHECK(schedule_name(d) == "OIOI");
    CHECK(parse_schedule("oi") == ScalingSchedule{ScalingStep::outside, ScalingStep::inside});
    CHECK(parse_schedule("").empty());
    CHECK_THROWS_AS(parse_schedule("OX"), std::invalid_argument);
}

TEST_CASE("outside factors are row and column maxima") {
    const Matrix<double> a(2, 2, {1, 2, 3, 4});
    const Matrix<double> b(2, 2, {-5, 1, 2, -0.5});
    const OutsideFactors<double> f = outside_factors(a, b);
    CHECK(f.d_a == std::vector<double>{2, 4});
    CHECK(f.d_b == std::vector<double>{5, 1});
    CHECK(col_max_abs(a) == std::vector<double>{3, 4});
    CHECK(row_max_abs(b) == std::vector<double>{5, 2});
}

TEST_CASE("inside factors balance column maxima of A against row maxima of B") {
    const Matrix<double> a(2, 2, {1, 2, 3, 4});
    const Matrix<double> b(2, 2, {12, 1, 2, 16});
    const std::vector<double> d = inside_factors(a, b, ScalarMode::f64());
    CHECK(d[0] == doctest::Approx(2.0));  // sqrt(12 / 3)
    CHECK(d[1] == doctest::Approx(2.0));  // sqrt(16 / 4)
}

TEST_CASE("exact arithmetic recovers the product") {
    const Matrix<double> a(4, 4, {1, 2, 3, 4, 5, 6, 7, 8, 2, 1, 4, 3, 6, 5, 8, 7});
    const Matrix<double> b(4, 4, {1, 0, 2, 1, 3, 1, 0, 2, 1, 1, 1, 1, 2, 0, 1, 3});
    const Matrix<double> ab = oracle::matmul(a, b);
    for (std::size_t q : {0u, 1u, 2u})
        CHECK(rel(rescaled_multiply(strassen_formula(), a, b, q, default_schedule(), ScalarMode::f64()), ab) <= 1e-12);
    const Matrix<double> g = gaussian(16, 1), h = gaussian(16, 2);
    CHECK(rel(rescaled_multiply(strassen_formula(), g, h, 3, default_schedule(), ScalarMode::f64()), oracle::matmul(g, h)) <=
          1e-12);
}

TEST_CASE("empty schedule is the deterministic recursion, bitwise") {
    const BilinearFormula s = strassen_formula();
    const Matrix<double> a = gaussian(16, 3), b = gaussian(16, 4);
    for (const char* name : {"f64", "f32", "dec3"}) {
        const ScalarMode mode = ScalarMode::parse(name);
        dispatch_scalar(mode, [&]<class T>() {
            const Matrix<T> at = to_mode<T>(a, mode), bt = to_mode<T>(b, mode);
            CHECK(rescaled_multiply(s, at, bt, 2, {}, mode) == recursive_apply(s, at, bt, 2, mode));
            return 0;
        });
    }
}

TEST_CASE("degenerate inputs are rejected") {
    Matrix<double> a = gaussian(4, 5), b = gaussian(4, 6);
    Matrix<double> zero_row = a;
    for (std::size_t j = 0; j < 4; ++j) zero_row(2, j) = 0.0;
    CHECK_THROWS_AS(rescaled_multiply(strassen_formula(), zero_row, b, 1, default_schedule(), ScalarMode::f64()),
                    DegenerateInputError);
    Matrix<double> zero_col = a;
    for (std::size_t i = 0; i < 4; ++i) zero_col(i, 1) = 0.0;
    CHECK_THROWS_AS(rescaled_multiply(strassen_formula(), zero_col, b, 1, {ScalingStep::inside}, ScalarMode::f64()),
                    DegenerateInputError);
    CHECK_NOTHROW(rescaled_multiply(strassen_formula(), zero_col, b, 1, {}, ScalarMode::f64()));
}

TEST_CASE("outside factors scale exactly with the input") {
    const Matrix<double> a = gaussian(8, 7), b = gaussian(8, 8);
    for (double c : {-2.0, 0.5, 8.0}) {
        Matrix<double> ca = a;
        for (double& x : ca.values()) x *= c;
        const OutsideFactors<double> base = outside_factors(a, b), scaled = outside_factors(ca, b);
        for (std::size_t i = 0; i < 8; ++i) CHECK(scaled.d_a[i] == std::fabs(c) * base.d_a[i]);
    }
}

TEST_CASE("rescaling levels badly scaled inputs") {
    // Rows of A spanning many orders of magnitude: single-precision recursion
    // loses the small rows, rescaling keeps them.
    Matrix<double> a = gaussian(32, 9);
    const Matrix<double> b = gaussian(32, 10);
    for (std::size_t i = 0; i < 32; ++i)
        for (std::size_t j = 0; j < 32; ++j) a(i, j) *= std::pow(10.0, -static_cast<double>(i % 8));
    const ScalarMode f32 = ScalarMode::f32();
    const Matrix<float> af = to_mode<float>(a, f32), bf = to_mode<float>(b, f32);
    const Matrix<double> ab = oracle::matmul(to_double(af), to_double(bf));
    double worst_plain = 0.0, worst_scaled = 0.0;
    const Matrix<double> plain = to_double(recursive_apply(strassen_formula(), af, bf, 3, f32));
    const Matrix<double> scaled = to_double(rescaled_multiply(strassen_formula(), af, bf, 3, default_schedule(), f32));
    for (std::size_t i = 0; i < 32; ++i) {
        double row_norm = 0.0, ep = 0.0, es = 0.0;
        for (std::size_t j = 0; j < 32; ++j) {
            row_norm += ab(i, j) * ab(i, j);
            ep += (plain(i, j) - ab(i, j)) * (plain(i, j) - ab(i, j));
            es += (scaled(i, j) - ab(i, j)) * (scaled(i, j) - ab(i, j));
        }
        worst_plain = std::max(worst_plain, std::sqrt(ep / row_norm));
        worst_scaled = std::max(worst_scaled, std::sqrt(es / row_norm));
    }
    CHECK(worst_scaled < 1e-5);
    CHECK(worst_plain > 10.0 * worst_scaled);
}

TEST_CASE("factors live in the measured mode") {
    const ScalarMode d2 = ScalarMode::decimal(2);
    const Matrix<Decimal> a = to_mode<Decimal>(Matrix<double>(2, 2, {1, 2, 3, 4}), d2);
    const Matrix<Decimal> b = to_mode<Decimal>(Matrix<double>(2, 2, {3, 1, 1, 3}), d2);
    const std::vector<Decimal> d = inside_factors(a, b, d2);
    // sqrt(3 * fl(1/3)) = sqrt(0.99) -> 0.99 at two digits
    CHECK(d[0].to_double() == 0.99);
    // sqrt(3 * fl(1/4)) = sqrt(fl(0.75)) = sqrt(0.75) -> 0.87
    CHECK(d[1].to_double() == 0.87);
}
