#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "randbc/matrix.hpp"
#include "randbc/precision.hpp"

namespace randbc {

enum class MatrixKind { gaussian, uniform, adversarial1, adversarial2, adversarial3, hilbert };

/// Accepts gaussian, uniform, adv1..adv3 (or adversarial1..3) and hilbert.
MatrixKind parse_matrix_kind(std::string_view text);
std::string_view matrix_kind_name(MatrixKind kind);
const std::vector<MatrixKind>& all_matrix_kinds();

struct MatrixSpec {
    MatrixKind kind = MatrixKind::gaussian;
    std::size_t size = 0;
    std::uint64_t seed = 0;    // ignored for hilbert
    std::uint64_t stream = 0;  // selects an independent draw under the same seed

    /// Throws std::invalid_argument for size 0, or size < 2 for adversarial kinds.
    void validate() const;
};

template <class T>
struct MatrixPair {
    Matrix<T> a;
    Matrix<T> b;
};

/// Draws (A, B). A uses substream (seed, stream, 0, matrix_a) and B uses
/// (seed, stream, 0, matrix_b), entries in row-major order. Region tests use
/// 1-based indices and the exact half n/2. For hilbert, A = B = H.
MatrixPair<double> generate(const MatrixSpec& spec);

/// Hilbert matrix with entries correctly rounded into the mode.
template <class T>
Matrix<T> hilbert(std::size_t n, const ScalarMode& mode) {
    require_mode<T>(mode);
    Matrix<T> h(n, n, ScalarTraits<T>::zero(mode));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            h(i, j) = ScalarTraits<T>::from_ratio(1, static_cast<std::int64_t>(i + j + 1), mode);
    return h;
}

/// generate() with entries rounded into the mode. Hilbert entries are
/// rounded from the exact ratio, not from the binary double.
template <class T>
MatrixPair<T> generate_in(const MatrixSpec& spec, const ScalarMode& mode) {
    if (spec.kind == MatrixKind::hilbert) {
        spec.validate();
        Matrix<T> h = hilbert<T>(spec.size, mode);
        return {h, h};
    }
    const MatrixPair<double> pair = generate(spec);
    return {to_mode<T>(pair.a, mode), to_mode<T>(pair.b, mode)};
}

}  // namespace randbc
