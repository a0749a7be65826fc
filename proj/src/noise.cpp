#include "conesupport/noise.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace conesupport {

double spectral_norm(MatrixView m, const PowerIterationOptions& opts) {
    if (m.rows == 0 || m.cols == 0 || m.data.size() != m.rows * m.cols)
        throw std::invalid_argument("spectral_norm: empty or inconsistent matrix");

    std::vector<double> v(m.cols, 1.0 / std::sqrt(static_cast<double>(m.cols)));
    std::vector<double> mv(m.rows);
    std::vector<double> w(m.cols);
    double estimate = 0.0;

    for (int it = 0; it < opts.max_iterations; ++it) {
        for (std::size_t i = 0; i < m.rows; ++i) {
            double s = 0.0;
            const double* r = m.data.data() + i * m.cols;
            for (std::size_t j = 0; j < m.cols; ++j) s += r[j] * v[j];
            mv[i] = s;
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = 0; i < m.rows; ++i) {
            const double* r = m.data.data() + i * m.cols;
            for (std::size_t j = 0; j < m.cols; ++j) w[j] += r[j] * mv[i];
        }
        double wn = 0.0;
        for (double x : w) wn += x * x;
        wn = std::sqrt(wn);
        if (wn == 0.0) return 0.0;
        // Rayleigh quotient v^T M^T M v = ||M v||^2 for unit v.
        double mvn = 0.0;
        for (double x : mv) mvn += x * x;
        const double next = std::sqrt(mvn);
        for (std::size_t j = 0; j < m.cols; ++j) v[j] = w[j] / wn;
        if (it > 0 && std::abs(next - estimate) <= opts.rel_tol * next) return next;
        estimate = next;
    }
    throw ConvergenceError("spectral_norm: power iteration did not converge");
}

NoisyMatrix add_relative_noise(const FarFieldMatrix& g, const NoiseSpec& spec) {
    if (!(spec.relative_level >= 0.0)) throw std::invalid_argument("noise level must be non-negative");
    NoisyMatrix out{g, 0.0, 0.0};
    if (spec.relative_level == 0.0) return out;

    const double g_norm = spectral_norm(g);
    if (g_norm == 0.0) throw std::invalid_argument("cannot calibrate relative noise on a zero matrix");

    std::mt19937_64 rng(spec.seed);
    std::vector<double> e(g.values.size());
    for (double& x : e) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
        x = 2.0 * u - 1.0;
    }
    const double e_norm = spectral_norm({e, g.rows(), g.cols()});
    out.scale = spec.relative_level * g_norm / e_norm;
    for (std::size_t i = 0; i < e.size(); ++i) out.matrix.values[i] += out.scale * e[i];

    std::vector<double> diff(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) diff[i] = out.matrix.values[i] - g.values[i];
    out.achieved_ratio = spectral_norm({diff, g.rows(), g.cols()}) / g_norm;
    return out;
}

}  // namespace conesupport
