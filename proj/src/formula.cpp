#include "randbc/formula.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace randbc {

BilinearFormula::BilinearFormula(std::size_t n, std::size_t rank, std::vector<double> u, std::vector<double> v,
                                 std::vector<double> w)
    : n_(n), rank_(rank), u_(std::move(u)), v_(std::move(v)), w_(std::move(w)) {
    if (n_ == 0 || rank_ == 0) throw std::invalid_argument("formula needs n >= 1 and R >= 1");
    const std::size_t expected = n_ * n_ * rank_;
    if (u_.size() != expected || v_.size() != expected || w_.size() != expected)
        throw std::invalid_argument("coefficient tensors must all have shape n x n x R");
    for (const auto* t : {&u_, &v_, &w_})
        for (double x : *t)
            if (!std::isfinite(x)) throw std::invalid_argument("formula coefficients must be finite");
}

BilinearFormula strassen_formula() {
    constexpr std::size_t n = 2;
    constexpr std::size_t rank = 7;
    std::vector<double> u(n * n * rank, 0.0), v(u), w(u);
    auto set = [](std::vector<double>& t, std::size_t r, std::size_t i, std::size_t j, double x) {
        t[(r * n + i) * n + j] = x;
    };
    // M1 = (A11 + A22)(B11 + B22)
    set(u, 0, 0, 0, 1), set(u, 0, 1, 1, 1), set(v, 0, 0, 0, 1), set(v, 0, 1, 1, 1);
    set(w, 0, 0, 0, 1), set(w, 0, 1, 1, 1);
    // M2 = (A21 + A22) B11
    set(u, 1, 1, 0, 1), set(u, 1, 1, 1, 1), set(v, 1, 0, 0, 1);
    set(w, 1, 1, 0, 1), set(w, 1, 1, 1, -1);
    // M3 = A11 (B12 - B22)
    set(u, 2, 0, 0, 1), set(v, 2, 0, 1, 1), set(v, 2, 1, 1, -1);
    set(w, 2, 0, 1, 1), set(w, 2, 1, 1, 1);
    // M4 = A22 (B21 - B11)
    set(u, 3, 1, 1, 1), set(v, 3, 1, 0, 1), set(v, 3, 0, 0, -1);
    set(w, 3, 0, 0, 1), set(w, 3, 1, 0, 1);
    // M5 = (A11 + A12) B22
    set(u, 4, 0, 0, 1), set(u, 4, 0, 1, 1), set(v, 4, 1, 1, 1);
    set(w, 4, 0, 0, -1), set(w, 4, 0, 1, 1);
    // M6 = (A21 - A11)(B11 + B12)
    set(u, 5, 1, 0, 1), set(u, 5, 0, 0, -1), set(v, 5, 0, 0, 1), set(v, 5, 0, 1, 1);
    set(w, 5, 1, 1, 1);
    // M7 = (A12 - A22)(B21 + B22)
    set(u, 6, 0, 1, 1), set(u, 6, 1, 1, -1), set(v, 6, 1, 0, 1), set(v, 6, 1, 1, 1);
    set(w, 6, 0, 0, 1);
    return BilinearFormula(n, rank, std::move(u), std::move(v), std::move(w));
}

BilinearFormula standard_formula(std::size_t n) {
    if (n == 0) throw std::invalid_argument("standard_formula needs n >= 1");
    const std::size_t rank = n * n * n;
    std::vector<double> u(n * n * rank, 0.0), v(u), w(u);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l) {
                const std::size_t r = (i * n + j) * n + l;
                u[(r * n + i) * n + l] = 1.0;
                v[(r * n + l) * n + j] = 1.0;
                w[(r * n + i) * n + j] = 1.0;
            }
    return BilinearFormula(n, rank, std::move(u), std::move(v), std::move(w));
}

namespace {

std::vector<std::size_t> zero_positions(std::span<const double> t) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] == 0.0) out.push_back(i);
    return out;
}

// First k entries of a uniform random permutation of `pool`.
std::vector<std::size_t> pick_distinct(std::vector<std::size_t> pool, std::size_t k, Philox4x32& rng) {
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.uniform_index(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace

BilinearFormula perturb(const BilinearFormula& f, double sigma, std::size_t extra_zeros, Philox4x32& rng,
                        ZeroSelection selection) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("perturbation sigma must be > 0");
    std::array<std::vector<double>, 3> t{
        std::vector<double>(f.u_values().begin(), f.u_values().end()),
        std::vector<double>(f.v_values().begin(), f.v_values().end()),
        std::vector<double>(f.w_values().begin(), f.w_values().end()),
    };
    std::array<std::vector<std::size_t>, 3> zeros;
    for (std::size_t k = 0; k < 3; ++k) {
        zeros[k] = zero_positions(t[k]);
        if (selection == ZeroSelection::per_tensor && zeros[k].size() < extra_zeros)
            throw std::invalid_argument("extra_zeros exceeds the number of zero coefficients in a tensor");
    }
    if (selection == ZeroSelection::per_tensor) {
        for (std::size_t k = 0; k < 3; ++k) {
            for (double& x : t[k])
                if (x == 1.0) x += sigma * rng.normal();
            for (std::size_t pos : pick_distinct(zeros[k], extra_zeros, rng)) t[k][pos] += sigma * rng.normal();
        }
    } else {
        std::vector<std::size_t> pool;  // tensor * size + position
        const std::size_t size = t[0].size();
        for (std::size_t k = 0; k < 3; ++k)
            for (std::size_t pos : zeros[k]) pool.push_back(k * size + pos);
        if (pool.size() < extra_zeros)
            throw std::invalid_argument("extra_zeros exceeds the number of zero coefficients");
        for (std::size_t k = 0; k < 3; ++k)
            for (double& x : t[k])
                if (x == 1.0) x += sigma * rng.normal();
        for (std::size_t code : pick_distinct(std::move(pool), extra_zeros, rng))
            t[code / size][code % size] += sigma * rng.normal();
    }
    return BilinearFormula(f.n(), f.rank(), std::move(t[0]), std::move(t[1]), std::move(t[2]));
}

double kappa(const BilinearFormula& f) {
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

double eta(const BilinearFormula& f) {
    const double k = kappa(f);
    if (k == 1.0) throw std::domain_error("kappa == 1: the rescaling factor is undefined");
    return 1.0 / (1.0 - k) - 1.0;
}

namespace {

struct TensorNorms {
    double residual_sq = 0.0;
    double y_sq = 0.0;
    double max_abs = 0.0;
};

// residual_sq measures scale * Y - X; y_sq and max_abs are for scale = 1.
TensorNorms tensor_norms(const BilinearFormula& f, double scale = 1.0) {
    const std::size_t n = f.n();
    const std::size_t rank = f.rank();
    TensorNorms out;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            for (std::size_t kp = 0; kp < n; ++kp)
                for (std::size_t lp = 0; lp < n; ++lp)
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < n; ++j) {
                            double y = 0.0;
                            for (std::size_t r = 0; r < rank; ++r) y += f.u(r, k, l) * f.v(r, kp, lp) * f.w(r, i, j);
                            const double x = (k == i && lp == j && l == kp) ? 1.0 : 0.0;
                            const double d = y - x;
                            const double ds = scale * y - x;
                            out.residual_sq += ds * ds;
                            out.y_sq += y * y;
                            out.max_abs = std::max(out.max_abs, std::fabs(d));
                        }
    return out;
}

}  // namespace

double residual_norm(const BilinearFormula& f) { return std::sqrt(tensor_norms(f).residual_sq); }

double scaled_residual_norm(const BilinearFormula& f, double scale) {
    return std::sqrt(tensor_norms(f, scale).residual_sq);
}

double y_norm(const BilinearFormula& f) { return std::sqrt(tensor_norms(f).y_sq); }

bool is_exact(const BilinearFormula& f, double tol) { return tensor_norms(f).max_abs <= tol; }

double weight_norm_product(const BilinearFormula& f) {
    const std::size_t nn = f.n() * f.n();
    double total = 0.0;
    for (std::size_t r = 0; r < f.rank(); ++r) {
        double su = 0.0, sv = 0.0, sw = 0.0;
        for (std::size_t e = 0; e < nn; ++e) {
            const std::size_t idx = r * nn + e;
            su += f.u_values()[idx] * f.u_values()[idx];
            sv += f.v_values()[idx] * f.v_values()[idx];
            sw += f.w_values()[idx] * f.w_values()[idx];
        }
        total += su * sv * sw;
    }
    return std::sqrt(total);
}

FormulaDiagnostics diagnose(const BilinearFormula& f, double exact_tol) {
    const TensorNorms norms = tensor_norms(f);
    FormulaDiagnostics d;
    d.kappa = kappa(f);
    d.eta = d.kappa == 1.0 ? std::numeric_limits<double>::infinity() : 1.0 / (1.0 - d.kappa) - 1.0;
    d.residual_norm = std::sqrt(norms.residual_sq);
    d.y_norm = std::sqrt(norms.y_sq);
    d.weight_norm_product = weight_norm_product(f);
    d.is_exact = norms.max_abs <= exact_tol;
    return d;
}

// ---------------------------------------------------------------------------
// Formula files

namespace {

nlohmann::json tensor_to_json(std::span<const double> t, std::size_t n, std::size_t rank) {
    auto grids = nlohmann::json::array();
    for (std::size_t r = 0; r < rank; ++r) {
        auto grid = nlohmann::json::array();
        for (std::size_t i = 0; i < n; ++i) {
            auto row = nlohmann::json::array();
            for (std::size_t j = 0; j < n; ++j) row.push_back(t[(r * n + i) * n + j]);
            grid.push_back(std::move(row));
        }
        grids.push_back(std::move(grid));
    }
    return grids;
}

std::vector<double> tensor_from_json(const nlohmann::json& j, const char* name, std::size_t n, std::size_t rank) {
    if (!j.is_array() || j.size() != rank)
        throw std::runtime_error(std::string("formula file: ") + name + " must hold R grids");
    std::vector<double> out;
    out.reserve(n * n * rank);
    for (const auto& grid : j) {
        if (!grid.is_array() || grid.size() != n)
            throw std::runtime_error(std::string("formula file: ") + name + " grid must have n rows");
        for (const auto& row : grid) {
            if (!row.is_array() || row.size() != n)
                throw std::runtime_error(std::string("formula file: ") + name + " row must have n entries");
            for (const auto& x : row) {
                if (!x.is_number()) throw std::runtime_error(std::string("formula file: non-numeric entry in ") + name);
                out.push_back(x.get<double>());
            }
        }
    }
    return out;
}

}  // namespace

void write_formula(std::ostream& out, const BilinearFormula& f) {
    nlohmann::ordered_json doc;
    doc["n"] = f.n();
    doc["R"] = f.rank();
    doc["U"] = tensor_to_json(f.u_values(), f.n(), f.rank());
    doc["V"] = tensor_to_json(f.v_values(), f.n(), f.rank());
    doc["W"] = tensor_to_json(f.w_values(), f.n(), f.rank());
    out << doc.dump(1) << '\n';
}

BilinearFormula read_formula(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("formula file: ") + e.what());
    }
    if (!doc.contains("n") || !doc.contains("R") || !doc["n"].is_number_unsigned() || !doc["R"].is_number_unsigned())
        throw std::runtime_error("formula file: missing positive integer fields n and R");
    const auto n = doc["n"].get<std::size_t>();
    const auto rank = doc["R"].get<std::size_t>();
    for (const char* key : {"U", "V", "W"})
        if (!doc.contains(key)) throw std::runtime_error(std::string("formula file: missing tensor ") + key);
    return BilinearFormula(n, rank, tensor_from_json(doc["U"], "U", n, rank), tensor_from_json(doc["V"], "V", n, rank),
                           tensor_from_json(doc["W"], "W", n, rank));
}

void save_formula(const std::filesystem::path& path, const BilinearFormula& f) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_formula(out, f);
}

BilinearFormula load_formula(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_formula(in);
}

}  // namespace randbc
