#include "randbc/matgen.hpp"

#include <stdexcept>
#include <string>

#include "randbc/rng.hpp"

namespace randbc {

MatrixKind parse_matrix_kind(std::string_view text) {
    if (text == "gaussian") return MatrixKind::gaussian;
    if (text == "uniform") return MatrixKind::uniform;
    if (text == "adv1" || text == "adversarial1") return MatrixKind::adversarial1;
    if (text == "adv2" || text == "adversarial2") return MatrixKind::adversarial2;
    if (text == "adv3" || text == "adversarial3") return MatrixKind::adversarial3;
    if (text == "hilbert") return MatrixKind::hilbert;
    throw std::invalid_argument("unknown matrix type '" + std::string(text) +
                                "' (expected gaussian, uniform, adv1, adv2, adv3 or hilbert)");
}

std::string_view matrix_kind_name(MatrixKind kind) {
    switch (kind) {
        case MatrixKind::gaussian:
            return "gaussian";
        case MatrixKind::uniform:
            return "uniform";
        case MatrixKind::adversarial1:
            return "adv1";
        case MatrixKind::adversarial2:
            return "adv2";
        case MatrixKind::adversarial3:
            return "adv3";
        case MatrixKind::hilbert:
            return "hilbert";
    }
    return "?";
}

const std::vector<MatrixKind>& all_matrix_kinds() {
    static const std::vector<MatrixKind> kinds{MatrixKind::gaussian,     MatrixKind::uniform,
                                               MatrixKind::adversarial1, MatrixKind::adversarial2,
                                               MatrixKind::adversarial3, MatrixKind::hilbert};
    return kinds;
}

void MatrixSpec::validate() const {
    if (size == 0) throw std::invalid_argument("matrix size must be positive");
    const bool adversarial = kind == MatrixKind::adversarial1 || kind == MatrixKind::adversarial2 ||
                             kind == MatrixKind::adversarial3;
    if (adversarial && size < 2) throw std::invalid_argument("adversarial matrices need size >= 2");
}

namespace {

// Upper end of the Uniform(0, x) distribution of entry (i, j), 1-based.
// Comparisons against n/2 are done as 2i < n etc. so the half is exact.
using Region = double (*)(std::size_t i, std::size_t j, std::size_t n, double small, double large);

double adv1_a(std::size_t, std::size_t j, std::size_t n, double small, double) { return 2 * j > n ? small : 1.0; }
double adv1_b(std::size_t i, std::size_t, std::size_t n, double small, double) { return 2 * i < n ? small : 1.0; }
double adv2_a(std::size_t i, std::size_t j, std::size_t n, double, double large) {
    return 2 * i < n && 2 * j > n ? large : 1.0;
}
double adv2_b(std::size_t, std::size_t j, std::size_t n, double small, double) { return 2 * j < n ? small : 1.0; }
double adv3(std::size_t i, std::size_t j, std::size_t n, double small, double) {
    const bool upper_right = 2 * i < n && 2 * j > n;
    const bool lower_left = 2 * i >= n && 2 * j <= n;
    return upper_right || lower_left ? small : 1.0;
}

Matrix<double> draw_uniform(std::size_t n, Philox4x32& rng, Region region) {
    const double nd = static_cast<double>(n);
    const double small = 1.0 / (nd * nd);
    const double large = nd * nd;
    Matrix<double> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = region(i + 1, j + 1, n, small, large) * rng.uniform01();
    return m;
}

Matrix<double> draw_gaussian(std::size_t n, Philox4x32& rng) {
    Matrix<double> m(n, n);
    for (double& x : m.values()) x = rng.normal();
    return m;
}

double unit_region(std::size_t, std::size_t, std::size_t, double, double) { return 1.0; }

}  // namespace

MatrixPair<double> generate(const MatrixSpec& spec) {
    spec.validate();
    const std::size_t n = spec.size;
    if (spec.kind == MatrixKind::hilbert) {
        Matrix<double> h = hilbert<double>(n, ScalarMode::f64());
        return {h, h};
    }
    Philox4x32 ra = substream(spec.seed, spec.stream, 0, StreamRole::matrix_a);
    Philox4x32 rb = substream(spec.seed, spec.stream, 0, StreamRole::matrix_b);
    switch (spec.kind) {
        case MatrixKind::gaussian:
            return {draw_gaussian(n, ra), draw_gaussian(n, rb)};
        case MatrixKind::uniform:
            return {draw_uniform(n, ra, unit_region), draw_uniform(n, rb, unit_region)};
        case MatrixKind::adversarial1:
            return {draw_uniform(n, ra, adv1_a), draw_uniform(n, rb, adv1_b)};
        case MatrixKind::adversarial2:
            return {draw_uniform(n, ra, adv2_a), draw_uniform(n, rb, adv2_b)};
        case MatrixKind::adversarial3:
            return {draw_uniform(n, ra, adv3), draw_uniform(n, rb, adv3)};
        case MatrixKind::hilbert:
            break;
    }
    throw std::logic_error("unhandled matrix kind");
}

}  // namespace randbc
