#pragma once

// Range conditions for a sampled far field: support confinement of the shifted data and
// polynomial degrees of its time moments (real spherical harmonic least squares).

#include <vector>

#include "conesupport/geometry.hpp"
#include "conesupport/sphere_mesh.hpp"
#include "conesupport/wavefield.hpp"

namespace conesupport {

struct MomentField {
    int ell = 0;
    std::vector<double> values;  // one per mesh direction
};

/// mu[m] = trapezoid sum of g[m][k] * times[k]^ell.
MomentField moment(const FarFieldMatrix& g, int ell);

/// Moments of the shifted far field tau -> g(tau + tau_c - x.z_c/c0, x), computed by the change of
/// variables tau = t - tau_c + x.z_c/c0 on the original samples (no interpolation).
MomentField shifted_moment(const FarFieldMatrix& g, int ell, double tau_c, const Vec3& z_c, double c0);

/// Real spherical harmonics Y_{l,m}, l <= max_degree, ordered l*l + l + m; orthonormal on S^2.
std::vector<double> real_spherical_harmonics(int max_degree, const Vec3& direction);

struct DegreeTestResult {
    bool pass = false;
    double residual = 0.0;
};

/// Weighted least-squares fit by harmonics up to degree L; residual = misfit energy / max(total energy, reference).
/// Throws std::invalid_argument for L < 0, L > 12 or a rank-deficient design on the mesh.
DegreeTestResult polynomial_degree_test(const MomentField& mu, const SphereMesh& mesh, const std::vector<double>& weights,
                                        int max_degree, double rel_tol = 1e-3, double reference_energy = 0.0);

struct FriedlanderOptions {
    int ell_max = 4;
    double rel_tol = 1e-3;
    std::size_t n_lead = 20;
    double factor = 1.2;
};

struct SupportCheck {
    bool pass = true;
    double max_abs_shift = 0.0;  // largest |tau| with shifted data above threshold
    double margin = 0.0;         // R + dt - max_abs_shift
};

struct MomentCheck {
    int ell = 0;
    double residual = 0.0;
    bool pass = false;
};

struct FriedlanderReport {
    double radius = 0.0;
    double tau_c = 0.0;
    Vec3 z_c{0.0, 0.0, 0.0};
    SupportCheck support;
    std::vector<MomentCheck> moments;

    bool moments_pass() const;
    bool pass() const { return support.pass && moments_pass(); }
};

FriedlanderReport friedlander_report(const FarFieldMatrix& g, double radius, double tau_c, const Vec3& z_c, double c0,
                                     const FriedlanderOptions& opts = {});

}  // namespace conesupport
