#pragma once

// Independent reference computations used by the tests. None of these reuse
// the library kernels; they follow the defining sums literally.

#include <cmath>
#include <cstddef>
#include <vector>

#include "randbc/formula.hpp"
#include "randbc/matrix.hpp"
#include "randbc/randomize.hpp"

namespace oracle {

using randbc::BilinearFormula;
using randbc::Matrix;

/// kappa = n^-3 sum_{i,j,l} (1 - sum_r u_ilr v_ljr w_ijr), triple loop.
inline double kappa(const BilinearFormula& f) {
    const std::size_t n = f.n();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l) {
                double s = 0.0;
                for (std::size_t r = 0; r < f.rank(); ++r) s += f.u(r, i, l) * f.v(r, l, j) * f.w(r, i, j);
                total += 1.0 - s;
            }
    return total / static_cast<double>(n * n * n);
}

/// Materializes Y and X as flat n^6 arrays and returns ||scale * Y - X||.
inline double residual(const BilinearFormula& f, double scale = 1.0) {
    const std::size_t n = f.n();
    const std::size_t n2 = n * n;
    std::vector<double> y(n2 * n2 * n2, 0.0), x(n2 * n2 * n2, 0.0);
    auto at = [&](std::size_t k, std::size_t l, std::size_t kp, std::size_t lp, std::size_t i, std::size_t j) {
        return ((((k * n + l) * n + kp) * n + lp) * n + i) * n + j;
    };
    for (std::size_t r = 0; r < f.rank(); ++r)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t l = 0; l < n; ++l)
                for (std::size_t kp = 0; kp < n; ++kp)
                    for (std::size_t lp = 0; lp < n; ++lp)
                        for (std::size_t i = 0; i < n; ++i)
                            for (std::size_t j = 0; j < n; ++j)
                                y[at(k, l, kp, lp, i, j)] += f.u(r, k, l) * f.v(r, kp, lp) * f.w(r, i, j);
    // x = delta_ki delta_l'j delta_lk'
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l) x[at(i, l, l, j, i, j)] = 1.0;
    double s = 0.0;
    for (std::size_t e = 0; e < y.size(); ++e) s += (scale * y[e] - x[e]) * (scale * y[e] - x[e]);
    return std::sqrt(s);
}

/// Plain triple-loop product in double.
inline Matrix<double> matmul(const Matrix<double>& a, const Matrix<double>& b) {
    Matrix<double> c(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

inline Matrix<double> transpose(const Matrix<double>& a) {
    Matrix<double> t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

/// Block form: C_ij = sum_r w_ijr sum_{k,l,k',l'} u_klr v_k'l'r A_kl B_k'l',
/// with each block product formed by the triple loop.
inline Matrix<double> bilinear(const BilinearFormula& f, const Matrix<double>& a, const Matrix<double>& b,
                               double output_scale = 1.0) {
    const std::size_t n = f.n();
    const std::size_t m = a.rows() / n;
    auto block = [&](const Matrix<double>& src, std::size_t bi, std::size_t bj) {
        Matrix<double> out(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) out(i, j) = src(bi * m + i, bj * m + j);
        return out;
    };
    Matrix<double> c(a.rows(), a.cols(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l)
                    for (std::size_t kp = 0; kp < n; ++kp)
                        for (std::size_t lp = 0; lp < n; ++lp) {
                            double coef = 0.0;
                            for (std::size_t r = 0; r < f.rank(); ++r)
                                coef += f.u(r, k, l) * f.v(r, kp, lp) * f.w(r, i, j);
                            if (coef == 0.0) continue;
                            const Matrix<double> p = matmul(block(a, k, l), block(b, kp, lp));
                            for (std::size_t x = 0; x < m; ++x)
                                for (std::size_t y = 0; y < m; ++y)
                                    c(i * m + x, j * m + y) += output_scale * coef * p(x, y);
                        }
    return c;
}

/// (1 - kappa)^-1 M1^T f(M1 A M2^T, M2 B M3^T) M3 with explicit orthogonal
/// matrices built from the plan's definition (block j -> block pi(j), times s(j)).
inline Matrix<double> sandwich(const BilinearFormula& f, const randbc::RandomizationPlan& plan,
                               const Matrix<double>& a, const Matrix<double>& b) {
    const std::size_t n = f.n();
    const std::size_t m = a.rows() / n;
    auto factor = [&](std::size_t which) {
        Matrix<double> M(n * m, n * m, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t e = 0; e < m; ++e)
                M(plan.perms[which][j] * m + e, j * m + e) = static_cast<double>(plan.signs[which][j]);
        return M;
    };
    const Matrix<double> m1 = factor(0), m2 = factor(1), m3 = factor(2);
    const Matrix<double> at = matmul(matmul(m1, a), transpose(m2));
    const Matrix<double> bt = matmul(matmul(m2, b), transpose(m3));
    const Matrix<double> inner = bilinear(f, at, bt, 1.0 / (1.0 - oracle::kappa(f)));
    return matmul(matmul(transpose(m1), inner), m3);
}

inline double frob(const Matrix<double>& a) {
    double s = 0.0;
    for (double x : a.values()) s += x * x;
    return std::sqrt(s);
}

inline double dist(const Matrix<double>& a, const Matrix<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
    return std::sqrt(s);
}

/// Gaussian n x n matrix from a seeded Philox stream.
inline Matrix<double> gaussian(std::size_t n, randbc::Philox4x32& rng) {
    Matrix<double> a(n, n);
    for (double& x : a.values()) x = rng.normal();
    return a;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace oracle
