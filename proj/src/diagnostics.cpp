#include "conesupport/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "conesupport/separation.hpp"

namespace conesupport {

namespace {

constexpr int kMaxDegree = 12;

// absolute: integrate |g| |t - offset|^ell instead, an upper bound for |mu|.
MomentField weighted_moment(const FarFieldMatrix& g, int ell, const std::vector<double>& offsets,
                            bool absolute = false) {
    if (ell < 0) throw std::invalid_argument("moment: ell must be non-negative");
    g.validate();
    const double dt = g.times.step();
    MomentField out{ell, std::vector<double>(g.rows(), 0.0)};
    for (std::size_t m = 0; m < g.rows(); ++m) {
        const auto row = g.row(m);
        double sum = 0.0;
        for (std::size_t k = 0; k < g.cols(); ++k) {
            const double w = (k == 0 || k + 1 == g.cols()) ? 0.5 : 1.0;
            const double s = g.times.at(k) - offsets[m];
            sum += absolute ? w * std::abs(row[k]) * std::pow(std::abs(s), ell) : w * row[k] * std::pow(s, ell);
        }
        out.values[m] = sum * dt;
    }
    return out;
}

}  // namespace

MomentField moment(const FarFieldMatrix& g, int ell) {
    return weighted_moment(g, ell, std::vector<double>(g.rows(), 0.0));
}

MomentField shifted_moment(const FarFieldMatrix& g, int ell, double tau_c, const Vec3& z_c, double c0) {
    if (!(c0 > 0.0)) throw std::invalid_argument("shifted_moment: c0 must be positive");
    std::vector<double> offsets(g.rows());
    for (std::size_t m = 0; m < g.rows(); ++m) offsets[m] = tau_c - dot(g.mesh.directions[m], z_c) / c0;
    return weighted_moment(g, ell, offsets);
}

std::vector<double> real_spherical_harmonics(int max_degree, const Vec3& direction) {
    if (max_degree < 0) throw std::invalid_argument("real_spherical_harmonics: negative degree");
    const double r = norm(direction);
    if (!(r > 0.0)) throw std::invalid_argument("real_spherical_harmonics: zero direction");
    const double x = std::clamp(direction[2] / r, -1.0, 1.0);
    const double phi = std::atan2(direction[1], direction[0]);
    const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));
    const int L = max_degree;

    // Unnormalized associated Legendre functions P_l^m(x), m >= 0.
    std::vector<double> p((L + 1) * (L + 1), 0.0);
    auto P = [&](int l, int m) -> double& { return p[l * (L + 1) + m]; };
    P(0, 0) = 1.0;
    for (int m = 1; m <= L; ++m) P(m, m) = -(2.0 * m - 1.0) * sx * P(m - 1, m - 1);
    for (int m = 0; m < L; ++m) P(m + 1, m) = x * (2.0 * m + 1.0) * P(m, m);
    for (int m = 0; m <= L; ++m)
        for (int l = m + 2; l <= L; ++l)
            P(l, m) = ((2.0 * l - 1.0) * x * P(l - 1, m) - (l + m - 1.0) * P(l - 2, m)) / (l - m);

    std::vector<double> y((L + 1) * (L + 1), 0.0);
    for (int l = 0; l <= L; ++l) {
        for (int m = 0; m <= l; ++m) {
            // (l-m)!/(l+m)! via lgamma is accurate enough at these degrees.
            const double ratio = std::exp(std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0));
            const double n = std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi) * ratio);
            if (m == 0) {
                y[l * l + l] = n * P(l, 0);
            } else {
                y[l * l + l + m] = std::numbers::sqrt2 * n * P(l, m) * std::cos(m * phi);
                y[l * l + l - m] = std::numbers::sqrt2 * n * P(l, m) * std::sin(m * phi);
            }
        }
    }
    return y;
}

DegreeTestResult polynomial_degree_test(const MomentField& mu, const SphereMesh& mesh, const std::vector<double>& weights,
                                        int max_degree, double rel_tol, double reference_energy) {
    if (max_degree < 0) throw std::invalid_argument("polynomial_degree_test: L must be non-negative");
    if (max_degree > kMaxDegree) throw std::invalid_argument("polynomial_degree_test: L > 12 is not supported");
    if (mu.values.size() != mesh.size() || weights.size() != mesh.size())
        throw std::invalid_argument("polynomial_degree_test: field, mesh and weights disagree in size");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("polynomial_degree_test: rel_tol must be positive");
    if (!(reference_energy >= 0.0)) throw std::invalid_argument("polynomial_degree_test: negative reference energy");

    const auto n = static_cast<Eigen::Index>(mesh.size());
    const Eigen::Index cols = (max_degree + 1) * (max_degree + 1);
    Eigen::MatrixXd a(n, cols);
    Eigen::VectorXd b(n);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(weights[i] > 0.0)) throw std::invalid_argument("polynomial_degree_test: weights must be positive");
        const double sw = std::sqrt(weights[i]);
        const auto y = real_spherical_harmonics(max_degree, mesh.directions[i]);
        for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = sw * y[j];
        b(i) = sw * mu.values[i];
        total += b(i) * b(i);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < cols) throw std::invalid_argument("polynomial_degree_test: mesh too coarse for degree " +
                                                       std::to_string(max_degree));
    const double scale = std::max(total, reference_energy);
    if (scale == 0.0) return {true, 0.0};
    const Eigen::VectorXd coef = qr.solve(b);
    const double misfit = (a * coef - b).squaredNorm();
    const double residual = misfit / scale;
    return {residual < rel_tol, residual};
}

bool FriedlanderReport::moments_pass() const {
    return std::all_of(moments.begin(), moments.end(), [](const MomentCheck& c) { return c.pass; });
}

FriedlanderReport friedlander_report(const FarFieldMatrix& g, double radius, double tau_c, const Vec3& z_c, double c0,
                                     const FriedlanderOptions& opts) {
    g.validate();
    if (!(c0 > 0.0)) throw std::invalid_argument("friedlander_report: c0 must be positive");
    if (!(radius >= 0.0)) throw std::invalid_argument("friedlander_report: radius must be non-negative");
    if (opts.ell_max < 0 || opts.ell_max > kMaxDegree)
        throw std::invalid_argument("friedlander_report: ell_max out of range");

    FriedlanderReport rep;
    rep.radius = radius;
    rep.tau_c = tau_c;
    rep.z_c = z_c;

    const auto thr = estimate_thresholds(g, std::min(opts.n_lead, g.cols()), opts.factor);
    double worst = 0.0;
    for (std::size_t m = 0; m < g.rows(); ++m) {
        const double offset = -tau_c + dot(g.mesh.directions[m], z_c) / c0;
        const auto row = g.row(m);
        for (std::size_t k = 0; k < g.cols(); ++k)
            if (std::abs(row[k]) > thr.level[m]) worst = std::max(worst, std::abs(g.times.at(k) + offset));
    }
    rep.support.max_abs_shift = worst;
    rep.support.margin = radius + g.times.step() - worst;
    rep.support.pass = rep.support.margin >= 0.0;

    const auto weights = quadrature_weights(g.mesh);
    for (int ell = 0; ell <= opts.ell_max; ++ell) {
        const auto mu = shifted_moment(g, ell, tau_c, z_c, c0);
        // Odd central moments nearly cancel; measure the misfit against the absolute moment instead.
        std::vector<double> offsets(g.rows());
        for (std::size_t m = 0; m < g.rows(); ++m) offsets[m] = tau_c - dot(g.mesh.directions[m], z_c) / c0;
        const auto bound = weighted_moment(g, ell, offsets, true);
        double ref = 0.0;
        for (std::size_t m = 0; m < g.rows(); ++m) ref += weights[m] * bound.values[m] * bound.values[m];
        const auto res = polynomial_degree_test(mu, g.mesh, weights, ell, opts.rel_tol, ref);
        rep.moments.push_back({ell, res.residual, res.pass});
    }
    return rep;
}

}  // namespace conesupport
