#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "randbc/rng.hpp"

namespace randbc {

/// Coefficient tensors U, V, W of a bilinear matrix-multiplication formula
///
///   c_ij = sum_r w_ijr (sum_kl u_klr a_kl) (sum_k'l' v_k'l'r b_k'l')
///
/// over an n x n grid of blocks with `rank` bilinear terms. Each tensor is
/// stored densely with r slowest, then row, then column. Immutable once built.
class BilinearFormula {
public:
    BilinearFormula(std::size_t n, std::size_t rank, std::vector<double> u, std::vector<double> v,
                    std::vector<double> w);

    std::size_t n() const noexcept { return n_; }
    std::size_t rank() const noexcept { return rank_; }

    double u(std::size_t r, std::size_t row, std::size_t col) const noexcept { return u_[index(r, row, col)]; }
    double v(std::size_t r, std::size_t row, std::size_t col) const noexcept { return v_[index(r, row, col)]; }
    double w(std::size_t r, std::size_t row, std::size_t col) const noexcept { return w_[index(r, row, col)]; }

    std::span<const double> u_values() const noexcept { return u_; }
    std::span<const double> v_values() const noexcept { return v_; }
    std::span<const double> w_values() const noexcept { return w_; }

    std::size_t index(std::size_t r, std::size_t row, std::size_t col) const noexcept {
        return (r * n_ + row) * n_ + col;
    }

    friend bool operator==(const BilinearFormula&, const BilinearFormula&) = default;

private:
    std::size_t n_;
    std::size_t rank_;
    std::vector<double> u_;
    std::vector<double> v_;
    std::vector<double> w_;
};

/// Strassen's 2x2 algorithm, rank 7, coefficients in {-1, 0, 1}.
BilinearFormula strassen_formula();

/// The classical algorithm written as a bilinear formula of rank n^3. Term
/// r = (i*n + j)*n + l multiplies a_il by b_lj into c_ij.
BilinearFormula standard_formula(std::size_t n);

/// How the extra zero entries to perturb are chosen.
enum class ZeroSelection { per_tensor, across_tensors };

/// Adds N(0, sigma^2) noise to every coefficient equal to 1 and to
/// `extra_zeros` distinct, uniformly chosen zero coefficients. With
/// per_tensor selection each of U, V, W gets its own `extra_zeros` picks.
BilinearFormula perturb(const BilinearFormula& f, double sigma, std::size_t extra_zeros, Philox4x32& rng,
                        ZeroSelection selection = ZeroSelection::per_tensor);

struct FormulaDiagnostics {
    double kappa = 0.0;
    double eta = 0.0;
    double residual_norm = 0.0;        // ||Y - X||
    double y_norm = 0.0;               // ||Y||
    double weight_norm_product = 0.0;  // sqrt(sum_r |U_r|^2 |V_r|^2 |W_r|^2)
    bool is_exact = false;
};

/// kappa = n^-3 sum_{i,j,l} (1 - sum_r u_ilr v_ljr w_ijr), summed in double.
double kappa(const BilinearFormula& f);

/// (1 - kappa)^-1 - 1. Throws std::domain_error if kappa == 1.
double eta(const BilinearFormula& f);

/// Frobenius norm of Y - X over all n^6 index tuples, where
/// y_{k l k' l' i j} = sum_r u_klr v_k'l'r w_ijr and x is the product of
/// Kronecker deltas d_ki d_l'j d_lk'.
double residual_norm(const BilinearFormula& f);

/// ||scale * Y - X||.
double scaled_residual_norm(const BilinearFormula& f, double scale);

/// Frobenius norm of Y.
double y_norm(const BilinearFormula& f);

/// max |y - x| <= tol over all n^6 tuples.
bool is_exact(const BilinearFormula& f, double tol = 0.0);

double weight_norm_product(const BilinearFormula& f);

FormulaDiagnostics diagnose(const BilinearFormula& f, double exact_tol = 0.0);

/// JSON document {"n": .., "R": .., "U": [[[..]]], "V": .., "W": ..} with
/// each tensor as R grids of n x n numbers. Doubles round-trip exactly.
void write_formula(std::ostream& out, const BilinearFormula& f);
BilinearFormula read_formula(std::istream& in);
void save_formula(const std::filesystem::path& path, const BilinearFormula& f);
BilinearFormula load_formula(const std::filesystem::path& path);

}  // namespace randbc
