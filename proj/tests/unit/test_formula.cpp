#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "randbc/formula.hpp"
#include "randbc/rng.hpp"

using namespace randbc;

namespace {

BilinearFormula all_ones() {
    return BilinearFormula(2, 1, std::vector<double>(4, 1.0), std::vector<double>(4, 1.0), std::vector<double>(4, 1.0));
}

BilinearFormula perturbed(std::uint64_t seed) {
    Philox4x32 rng = substream(seed, 0, 0, StreamRole::formula);
    return perturb(strassen_formula(), 1e-3, 5, rng);
}

}  // namespace

TEST_CASE("strassen and standard formulas are exact") {
    const BilinearFormula s = strassen_formula();
    CHECK(s.n() == 2);
    CHECK(s.rank() == 7);
    CHECK(is_exact(s));
    CHECK(kappa(s) == 0.0);
    CHECK(residual_norm(s) == 0.0);
    CHECK(oracle::residual(s) == 0.0);
    for (double x : s.u_values()) CHECK((x == 0.0 || x == 1.0 || x == -1.0));

    for (std::size_t n : {1u, 2u, 3u}) {
        const BilinearFormula f = standard_formula(n);
        CHECK(f.rank() == n * n * n);
        CHECK(is_exact(f));
        CHECK(kappa(f) == 0.0);
    }
    CHECK_THROWS_AS(standard_formula(0), std::invalid_argument);
}

TEST_CASE("all-ones rank-1 formula") {
    const BilinearFormula f = all_ones();
    CHECK(kappa(f) == 0.0);
    CHECK(residual_norm(f) == doctest::Approx(std::sqrt(56.0)).epsilon(1e-15));
    CHECK(oracle::residual(f) == doctest::Approx(std::sqrt(56.0)).epsilon(1e-15));
    CHECK_FALSE(is_exact(f));
    CHECK(y_norm(f) == 8.0);
}

TEST_CASE("weight norm product") {
    CHECK(weight_norm_product(strassen_formula()) == doctest::Approx(std::sqrt(32.0)));
    CHECK(weight_norm_product(strassen_formula()) > 5.0);
    CHECK(weight_norm_product(strassen_formula()) < 7.0);
    CHECK(weight_norm_product(standard_formula(2)) == doctest::Approx(std::sqrt(8.0)));
    const double p = weight_norm_product(perturbed(42));
    CHECK(std::fabs(p / std::sqrt(32.0) - 1.0) < 0.01);
}

TEST_CASE("perturb is deterministic and local") {
    const BilinearFormula s = strassen_formula();
    const BilinearFormula a = perturbed(42), b = perturbed(42), c = perturbed(43);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    CHECK(s == strassen_formula());

    // Per tensor: every 1 moves, exactly five zeros move, -1 entries stay.
    auto check_tensor = [](std::span<const double> orig, std::span<const double> pert) {
        int moved_zeros = 0;
        for (std::size_t i = 0; i < orig.size(); ++i) {
            if (orig[i] == 1.0) CHECK(pert[i] != 1.0);
            if (orig[i] == -1.0) CHECK(pert[i] == -1.0);
            if (orig[i] == 0.0 && pert[i] != 0.0) ++moved_zeros;
            CHECK(std::fabs(pert[i] - orig[i]) < 0.01);
        }
        CHECK(moved_zeros == 5);
    };
    check_tensor(s.u_values(), a.u_values());
    check_tensor(s.v_values(), a.v_values());
    check_tensor(s.w_values(), a.w_values());

    Philox4x32 rng(1);
    CHECK_THROWS_AS(perturb(s, 0.0, 5, rng), std::invalid_argument);
    CHECK_THROWS_AS(perturb(s, 1e-3, 100, rng), std::invalid_argument);
}

TEST_CASE("diagnostics of perturbed formulas match the brute-force oracles") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const BilinearFormula f = perturbed(seed);
        const double k = kappa(f);
        CHECK(k == doctest::Approx(oracle::kappa(f)).epsilon(1e-15));
        const double res = residual_norm(f);
        CHECK(res == doctest::Approx(oracle::residual(f)).epsilon(1e-13));
        CHECK(res > 1e-4);
        CHECK(res < 0.1);
        CHECK(std::fabs(k) <= std::pow(2.0, -2.5) * res + 1e-16);
        CHECK(scaled_residual_norm(f, 1.0 / (1.0 - k)) ==
              doctest::Approx(oracle::residual(f, 1.0 / (1.0 - k))).epsilon(1e-12));
        CHECK(eta(f) == doctest::Approx(1.0 / (1.0 - k) - 1.0));
        CHECK_FALSE(is_exact(f, 1e-12));
    }
}

TEST_CASE("kappa bound holds on rank-3 random formulas at n = 3") {
    Philox4x32 rng(9);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> u(27), v(27), w(27);
        for (double& x : u) x = rng.normal();
        for (double& x : v) x = rng.normal();
        for (double& x : w) x = rng.normal();
        const BilinearFormula f(3, 3, u, v, w);
        CHECK(kappa(f) == doctest::Approx(oracle::kappa(f)).epsilon(1e-13));
        CHECK(residual_norm(f) == doctest::Approx(oracle::residual(f)).epsilon(1e-13));
        CHECK(std::fabs(kappa(f)) <= std::pow(3.0, -2.5) * residual_norm(f) * (1 + 1e-12));
    }
}

TEST_CASE("diagnose is consistent") {
    const FormulaDiagnostics d = diagnose(strassen_formula());
    CHECK(d.is_exact);
    CHECK(d.kappa == 0.0);
    CHECK(d.eta == 0.0);
    CHECK(d.residual_norm == 0.0);
    const FormulaDiagnostics p = diagnose(perturbed(3));
    CHECK_FALSE(p.is_exact);
    CHECK(p.residual_norm > 0.0);
    CHECK(p.eta == doctest::Approx(1.0 / (1.0 - p.kappa) - 1.0));
}

TEST_CASE("formula files round-trip exactly") {
    const BilinearFormula f = perturbed(42);
    std::stringstream io;
    write_formula(io, f);
    const BilinearFormula g = read_formula(io);
    CHECK(g == f);

    std::istringstream bad(R"({"n": 2, "R": 1, "U": [[[1,0],[0,1]]], "V": [[[1,0],[0,1]]]})");
    CHECK_THROWS(read_formula(bad));
}

TEST_CASE("invalid formulas are rejected") {
    CHECK_THROWS_AS(BilinearFormula(2, 1, std::vector<double>(3), std::vector<double>(4), std::vector<double>(4)),
                    std::invalid_argument);
    CHECK_THROWS_AS(BilinearFormula(0, 1, {}, {}, {}), std::invalid_argument);
    std::vector<double> nan(4, 0.0);
    nan[1] = std::nan("");
    CHECK_THROWS_AS(BilinearFormula(2, 1, nan, std::vector<double>(4), std::vector<double>(4)), std::invalid_argument);
}
