#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace faitheval {

// Dense row-major matrix of doubles. Small and deliberately minimal; the
// library only needs embeddings, gradients and one ridge solve.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }

    bool operator==(const Matrix&) const = default;

    Matrix& operator*=(double s) {
        for (double& x : data) x *= s;
        return *this;
    }
};

inline Matrix scaled(const Matrix& m, double s) {
    Matrix out = m;
    out *= s;
    return out;
}

// Solves A x = b for symmetric positive definite A via Cholesky, in place.
// Throws if A is not positive definite.
inline std::vector<double> cholesky_solve(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows;
    if (a.cols != n || b.size() != n) {
        throw std::invalid_argument("cholesky_solve: shape mismatch");
    }
    // Factor A = L L^T, storing L in the lower triangle.
    for (std::size_t j = 0; j < n; ++j) {
        double d = a.at(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a.at(j, k) * a.at(j, k);
        if (d <= 0.0) throw std::runtime_error("cholesky_solve: matrix not positive definite");
        const double ljj = std::sqrt(d);
        a.at(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a.at(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a.at(i, k) * a.at(j, k);
            a.at(i, j) = s / ljj;
        }
    }
    // Forward solve L y = b.
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a.at(i, k) * b[k];
        b[i] = s / a.at(i, i);
    }
    // Back solve L^T x = y.
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= a.at(k, ii) * b[k];
        b[ii] = s / a.at(ii, ii);
    }
    return b;
}

}  // namespace faitheval
