#pragma once
// Dense symmetric positive-definite solves for the IRLS inner loop. Problem
// sizes here are tiny (k <= ~16 parameters), so a plain Cholesky is all that
// is needed.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace evacuscope {

// Row-major square matrix view over a flat vector.
struct SquareMatrix {
    size_t k = 0;
    std::vector<double> a;  // k*k

    explicit SquareMatrix(size_t k_ = 0) : k(k_), a(k_ * k_, 0.0) {}
    double& at(size_t i, size_t j) { return a[i * k + j]; }
    double at(size_t i, size_t j) const { return a[i * k + j]; }
};

// In-place lower Cholesky A = L L^T. Returns the index of the first
// non-positive pivot on failure (rank deficiency / non-PD), nullopt on success.
inline std::optional<size_t> cholesky(SquareMatrix& m) {
    size_t k = m.k;
    for (size_t j = 0; j < k; ++j) {
        double d = m.at(j, j);
        for (size_t p = 0; p < j; ++p) d -= m.at(j, p) * m.at(j, p);
        if (!(d > 0.0) || !std::isfinite(d)) return j;
        double l = std::sqrt(d);
        m.at(j, j) = l;
        for (size_t i = j + 1; i < k; ++i) {
            double s = m.at(i, j);
            for (size_t p = 0; p < j; ++p) s -= m.at(i, p) * m.at(j, p);
            m.at(i, j) = s / l;
        }
    }
    // zero the strict upper triangle so the factor is unambiguous
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j) m.at(i, j) = 0.0;
    return std::nullopt;
}

// Solve L L^T x = b given the Cholesky factor.
inline std::vector<double> cholesky_solve(const SquareMatrix& L, const std::vector<double>& b) {
    size_t k = L.k;
    std::vector<double> y(k), x(k);
    for (size_t i = 0; i < k; ++i) {
        double s = b[i];
        for (size_t j = 0; j < i; ++j) s -= L.at(i, j) * y[j];
        y[i] = s / L.at(i, i);
    }
    for (size_t i = k; i-- > 0;) {
        double s = y[i];
        for (size_t j = i + 1; j < k; ++j) s -= L.at(j, i) * x[j];
        x[i] = s / L.at(i, i);
    }
    return x;
}

// Full inverse from the Cholesky factor (column-by-column solves).
inline SquareMatrix cholesky_inverse(const SquareMatrix& L) {
    size_t k = L.k;
    SquareMatrix inv(k);
    std::vector<double> e(k, 0.0);
    for (size_t c = 0; c < k; ++c) {
        e[c] = 1.0;
        std::vector<double> col = cholesky_solve(L, e);
        e[c] = 0.0;
        for (size_t r = 0; r < k; ++r) inv.at(r, c) = col[r];
    }
    return inv;
}

}  // namespace evacuscope
