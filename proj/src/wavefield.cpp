#include "conesupport/wavefield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace conesupport {

void TimeGrid::validate() const {
    if (count < 2) throw std::invalid_argument("time grid needs at least two samples");
    if (!(t_max > t_min)) throw std::invalid_argument("time grid needs t_max > t_min");
}

double GaussianPointSource::profile(double s) const {
    if (s * s > half_width * half_width) return 0.0;
    return amplitude * std::exp(-rate * s * s);
}

void GaussianPointSource::validate() const {
    if (!(rate > 0.0)) throw std::invalid_argument("gaussian source: rate must be positive");
    if (!(half_width > 0.0)) throw std::invalid_argument("gaussian source: half_width must be positive");
}

Vec3 CircularTrajectory::position(double t) const {
    const double w = 2.0 * std::numbers::pi / period;
    return {center[0] + radius * std::cos(w * t), center[1] + radius * std::sin(w * t),
            center[2] + radius * std::sin(w * t)};
}

Vec3 CircularTrajectory::velocity(double t) const {
    const double w = 2.0 * std::numbers::pi / period;
    return {-radius * w * std::sin(w * t), radius * w * std::cos(w * t), radius * w * std::cos(w * t)};
}

double MovingPointSource::profile(double u) const {
    if (!(u > window_start && u < window_end)) return 0.0;
    const double s = std::sin(std::numbers::pi * (u - window_start) / (window_end - window_start));
    if (!(s > 0.0)) return 0.0;  // window endpoints, by continuity
    const double arg = (u - profile_center) / std::pow(s, 0.25);
    return amplitude * std::exp(-rate * arg * arg);
}

double MovingPointSource::max_speed(int samples) const {
    double best = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = window_start + (window_end - window_start) * i / samples;
        best = std::max(best, norm(trajectory.velocity(t)));
    }
    return best;
}

void MovingPointSource::validate(double c0) const {
    if (!(window_end > window_start)) throw std::invalid_argument("moving source: empty time window");
    if (!(rate > 0.0)) throw std::invalid_argument("moving source: rate must be positive");
    if (!(trajectory.period > 0.0)) throw std::invalid_argument("moving source: period must be positive");
    if (!(max_speed() < c0)) throw std::invalid_argument("moving source: trajectory is not slower than c0");
}

FarFieldMatrix::FarFieldMatrix(TimeGrid grid, SphereMesh m)
    : times(grid), mesh(std::move(m)), values(mesh.size() * times.count, 0.0) {}

void FarFieldMatrix::validate() const {
    times.validate();
    if (values.size() != mesh.size() * times.count) throw std::invalid_argument("far-field matrix size mismatch");
}

NearFieldTrace::NearFieldTrace(TimeGrid grid, std::vector<Vec3> pts)
    : times(grid), points(std::move(pts)), values(points.size() * times.count, 0.0) {}

void NearFieldTrace::validate() const {
    times.validate();
    if (values.size() != points.size() * times.count) throw std::invalid_argument("near-field trace size mismatch");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i] == points[j]) throw std::invalid_argument("near-field trace: duplicate boundary point");
}

double eval_farfield(const GaussianPointSource& src, double tau, const Vec3& xhat, double c0) {
    return src.profile(tau - src.shift + dot(xhat, src.position) / c0);
}

double retarded_time(const MovingPointSource& src, double tau, const Vec3& xhat, double c0, int* iterations) {
    // Contraction needs |v| < c0 along the whole orbit, not only inside the window.
    const auto& tr = src.trajectory;
    if (!(std::abs(tr.radius) * 2.0 * std::numbers::pi / tr.period * std::sqrt(2.0) < c0))
        throw ConvergenceError("retarded time: trajectory speed reaches c0, fixed point iteration does not contract");
    double u = tau;
    for (int it = 1; it <= 200; ++it) {
        const double next = tau + dot(xhat, src.trajectory.position(u)) / c0;
        if (std::abs(next - u) < 1e-12) {
            if (iterations) *iterations = it;
            return next;
        }
        u = next;
    }
    throw ConvergenceError("retarded time fixed point did not converge (trajectory too fast?)");
}

double eval_farfield(const MovingPointSource& src, double tau, const Vec3& xhat, double c0) {
    const double u = retarded_time(src, tau, xhat, c0);
    double v = src.profile(u);
    if (v != 0.0 && src.retarded_jacobian) v /= std::abs(1.0 - dot(xhat, src.trajectory.velocity(u)) / c0);
    return v;
}

double eval_farfield(const Source& src, double tau, const Vec3& xhat, double c0) {
    return std::visit([&](const auto& s) { return eval_farfield(s, tau, xhat, c0); }, src);
}

double eval_nearfield(const GaussianPointSource& src, double t, const Vec3& x, double c0) {
    const double r = distance(x, src.position);
    if (!(r > 0.0)) throw std::domain_error("near field is singular at the source point");
    return src.profile(t - src.shift - r / c0) / (4.0 * std::numbers::pi * r);
}

FarFieldMatrix sample_farfield_matrix(std::span<const Source> sources, const SphereMesh& mesh, const TimeGrid& grid,
                                      double c0) {
    grid.validate();
    if (mesh.size() == 0) throw std::invalid_argument("sample_farfield_matrix: empty mesh");
    for (const auto& s : sources) {
        if (const auto* g = std::get_if<GaussianPointSource>(&s)) g->validate();
        if (const auto* m = std::get_if<MovingPointSource>(&s)) m->validate(c0);
    }
    FarFieldMatrix out(grid, mesh);
    for (std::size_t m = 0; m < mesh.size(); ++m)
        for (std::size_t k = 0; k < grid.count; ++k) {
            double v = 0.0;
            for (const auto& s : sources) v += eval_farfield(s, grid.at(k), mesh.directions[m], c0);
            out.at(m, k) = v;
        }
    return out;
}

NearFieldTrace sample_nearfield_trace(std::span<const GaussianPointSource> sources, std::span<const Vec3> points,
                                      const TimeGrid& grid, double c0) {
    grid.validate();
    NearFieldTrace out(grid, std::vector<Vec3>(points.begin(), points.end()));
    out.validate();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t k = 0; k < grid.count; ++k) {
            double v = 0.0;
            for (const auto& s : sources) v += eval_nearfield(s, grid.at(k), points[i], c0);
            out.at(i, k) = v;
        }
    return out;
}

FarFieldMatrix shift_farfield(const FarFieldMatrix& g, double tau0, const Vec3& z0, double c0) {
    g.validate();
    FarFieldMatrix out(g.times, g.mesh);
    const double dt = g.times.step();
    const auto last = static_cast<double>(g.times.count - 1);
    for (std::size_t m = 0; m < g.rows(); ++m) {
        const double offset = tau0 - dot(g.mesh.directions[m], z0) / c0;
        const auto src = g.row(m);
        auto dst = out.row(m);
        for (std::size_t k = 0; k < g.cols(); ++k) {
            double pos = (g.times.at(k) + offset - g.times.t_min) / dt;
            if (std::abs(pos) < 1e-9) pos = 0.0;
            if (std::abs(pos - last) < 1e-9) pos = last;
            if (pos < 0.0 || pos > last) continue;
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            if (lo + 1 >= g.times.count) {
                dst[k] = src[lo];
                continue;
            }
            const double frac = pos - static_cast<double>(lo);
            dst[k] = (1.0 - frac) * src[lo] + frac * src[lo + 1];
        }
    }
    return out;
}

}  // namespace conesupport
