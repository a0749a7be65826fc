#pragma once

#include <cmath>
#include <vector>

namespace testutil {

// Largest singular value of a row-major rows x cols matrix: cyclic Jacobi eigenvalues of M^T M.
inline double largest_singular_value_jacobi(const std::vector<double>& m, std::size_t rows, std::size_t cols) {
    std::vector<double> a(cols * cols, 0.0);
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            for (std::size_t r = 0; r < rows; ++r) a[i * cols + j] += m[r * cols + i] * m[r * cols + j];
    auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * cols + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < cols; ++i)
            for (std::size_t j = i + 1; j < cols; ++j) off += A(i, j) * A(i, j);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < cols; ++p)
            for (std::size_t q = p + 1; q < cols; ++q) {
                if (A(p, q) == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < cols; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < cols; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
            }
    }
    double best = 0.0;
    for (std::size_t i = 0; i < cols; ++i) best = std::max(best, A(i, i));
    return std::sqrt(best);
}

}  // namespace testutil
