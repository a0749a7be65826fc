#pragma once

// Analytic waves and far fields of point-like sources, sampled far-field matrices
// and the far-field shift g(tau, x) -> g(tau + tau0 - x.z0/c0, x).

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "conesupport/geometry.hpp"
#include "conesupport/sphere_mesh.hpp"

namespace conesupport {

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniform grid of `count` samples covering [t_min, t_max] inclusive.
struct TimeGrid {
    std::size_t count = 1000;
    double t_min = -10.0;
    double t_max = 10.0;

    double step() const { return count > 1 ? (t_max - t_min) / static_cast<double>(count - 1) : 0.0; }
    double at(std::size_t k) const { return t_min + static_cast<double>(k) * step(); }
    void validate() const;
};

/// Truncated Gaussian pulse amplitude * exp(-rate (t - shift)^2) on |t - shift| <= half_width,
/// emitted from a fixed point.
struct GaussianPointSource {
    Vec3 position{0.0, 0.0, 0.0};
    double shift = 0.0;
    double rate = 8.0;
    double half_width = 1.0;
    double amplitude = 1.0;

    double profile(double s) const;
    void validate() const;
};

/// s(t) = center + radius * (cos(2 pi t / period), sin(2 pi t / period), sin(2 pi t / period)).
struct CircularTrajectory {
    Vec3 center{2.0, 2.0, 0.0};
    double radius = 0.3;
    double period = 4.0;

    Vec3 position(double t) const;
    Vec3 velocity(double t) const;
};

/// Point source moving along a trajectory inside the open window (window_start, window_end),
/// with profile exp(-rate [(u - profile_center) / sin(pi (u - a) / (b - a))^(1/4)]^2).
/// profile_center = 0 on the window (0, 4) is the literal published profile.
struct MovingPointSource {
    CircularTrajectory trajectory;
    double window_start = 0.0;
    double window_end = 4.0;
    double rate = 8.0;
    double profile_center = 0.0;
    double amplitude = 1.0;
    /// Multiply by the retarded-time Jacobian 1 / |1 - x.s'(u)/c0| (off reproduces the published formula).
    bool retarded_jacobian = false;

    double profile(double u) const;
    /// Sampled sup |s'(t)| over the window.
    double max_speed(int samples = 2048) const;
    void validate(double c0) const;
};

using Source = std::variant<GaussianPointSource, MovingPointSource>;

/// values[m * times.count + k] = g(times[k], directions[m]).
struct FarFieldMatrix {
    TimeGrid times;
    SphereMesh mesh;
    std::vector<double> values;

    FarFieldMatrix() = default;
    FarFieldMatrix(TimeGrid grid, SphereMesh m);

    std::size_t rows() const { return mesh.size(); }
    std::size_t cols() const { return times.count; }
    double& at(std::size_t m, std::size_t k) { return values[m * times.count + k]; }
    double at(std::size_t m, std::size_t k) const { return values[m * times.count + k]; }
    std::span<const double> row(std::size_t m) const { return {values.data() + m * times.count, times.count}; }
    std::span<double> row(std::size_t m) { return {values.data() + m * times.count, times.count}; }
    void validate() const;
};

/// Near-field trace g(t, y) on boundary points y.
struct NearFieldTrace {
    TimeGrid times;
    std::vector<Vec3> points;
    std::vector<double> values;

    NearFieldTrace() = default;
    NearFieldTrace(TimeGrid grid, std::vector<Vec3> pts);

    std::size_t rows() const { return points.size(); }
    std::size_t cols() const { return times.count; }
    double& at(std::size_t i, std::size_t k) { return values[i * times.count + k]; }
    double at(std::size_t i, std::size_t k) const { return values[i * times.count + k]; }
    std::span<const double> row(std::size_t i) const { return {values.data() + i * times.count, times.count}; }
    void validate() const;
};

double eval_farfield(const GaussianPointSource& src, double tau, const Vec3& xhat, double c0);

/// Solves the retarded relation u = tau + x.s(u)/c0 by fixed-point iteration.
/// Throws ConvergenceError when 200 iterations do not reach |u_{k+1} - u_k| < 1e-12.
double retarded_time(const MovingPointSource& src, double tau, const Vec3& xhat, double c0, int* iterations = nullptr);

double eval_farfield(const MovingPointSource& src, double tau, const Vec3& xhat, double c0);

double eval_farfield(const Source& src, double tau, const Vec3& xhat, double c0);

/// Retarded potential of the point source: profile(t - shift - |x - p|/c0) / (4 pi |x - p|).
double eval_nearfield(const GaussianPointSource& src, double t, const Vec3& x, double c0);

FarFieldMatrix sample_farfield_matrix(std::span<const Source> sources, const SphereMesh& mesh, const TimeGrid& grid,
                                      double c0);

NearFieldTrace sample_nearfield_trace(std::span<const GaussianPointSource> sources, std::span<const Vec3> points,
                                      const TimeGrid& grid, double c0);

/// Linear interpolation of g at tau + tau0 - x.z0/c0 per direction; reads outside the grid give 0.
FarFieldMatrix shift_farfield(const FarFieldMatrix& g, double tau0, const Vec3& z0, double c0);

}  // namespace conesupport
