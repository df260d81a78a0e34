#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "randbc/precision.hpp"

namespace randbc {

/// Dense row-major matrix.
template <class T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw std::invalid_argument("matrix data length does not match shape");
    }

    static Matrix identity(std::size_t n, const T& zero, const T& one) {
        Matrix m(n, n, zero);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool is_square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }
    std::vector<T>& values() noexcept { return data_; }
    const std::vector<T>& values() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

template <class T>
Matrix<T> zeros(std::size_t rows, std::size_t cols, const ScalarMode& mode) {
    return Matrix<T>(rows, cols, ScalarTraits<T>::zero(mode));
}

/// Elementwise fl() into the target mode.
template <class T>
Matrix<T> to_mode(const Matrix<double>& a, const ScalarMode& mode) {
    require_mode<T>(mode);
    Matrix<T> out(a.rows(), a.cols(), ScalarTraits<T>::zero(mode));
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = ScalarTraits<T>::from_double(a.data()[i], mode);
    return out;
}

template <class T>
Matrix<double> to_double(const Matrix<T>& a) {
    Matrix<double> out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = ScalarTraits<T>::to_double(a.data()[i]);
    return out;
}

/// Frobenius norm accumulated in double.
template <class T>
double frobenius_norm(const Matrix<T>& a) {
    double sum = 0.0;
    for (const T& x : a.values()) {
        const double v = ScalarTraits<T>::to_double(x);
        sum += v * v;
    }
    return std::sqrt(sum);
}

/// ||a - b||_F in double.
template <class T>
double frobenius_distance(const Matrix<T>& a, const Matrix<double>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("shape mismatch in distance");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = ScalarTraits<T>::to_double(a.data()[i]) - b.data()[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

/// ||a - ref|| / ||ref|| in double.
template <class T>
double relative_error(const Matrix<T>& a, const Matrix<double>& ref) {
    return frobenius_distance(a, ref) / frobenius_norm(ref);
}

}  // namespace randbc
