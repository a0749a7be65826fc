#pragma once

// Conical support algorithm. Step (I) bounds each separated component by a cone centered at
// the spatial origin; step (II) scans a grid of spatial shifts z' and keeps the shift that
// minimizes the width of the shifted support interval
//   [min_x (T-(x) + z'.x/c0), max_x (T+(x) + z'.x/c0)],
// evaluated from the support functions without resampling the data.

#include <cstddef>
#include <utility>
#include <vector>

#include "conesupport/geometry.hpp"
#include "conesupport/separation.hpp"

namespace conesupport {

struct ShiftGrid {
    std::vector<Vec3> candidates;  // origin first, then j ascending, then mesh index ascending
    int denominator = 34;          // J
    int max_multiple = 51;         // j_max
};

struct ConeEstimate {
    std::size_t component = 0;
    ConicalSet step1;
    ConicalSet step2;
    bool improved = false;
    int denominator = 34;
    int max_multiple = 51;
};

struct CsaParams {
    double c0 = 1.0;
    int denominator = 34;
    int max_multiple = 51;
    /// Compare half widths (time units) instead of the literal full-width update rule.
    bool strict_width = false;
    SeparationParams separation;
};

/// tau = (Tmax + Tmin) / 2, R = (Tmax - Tmin) / 2 over all directions, z = 0.
ConicalSet step1_bound(const DirectionalSupport& ds);

/// {0} u {(j / J) * radius * x_m : j = 1..j_max, m over mesh directions}.
ShiftGrid build_shift_grid(double radius, const SphereMesh& mesh, int denominator = 34, int max_multiple = 51);

/// (T-_{z'}, T+_{z'}) from the support functions; directions absent from ds impose nothing.
std::pair<double, double> shifted_interval(const DirectionalSupport& ds, const Vec3& zprime, double c0);

/// Literal mode: R* starts at step1.R and is replaced by any strictly smaller full width
/// T+ - T-. Strict mode compares (T+ - T-) / 2 instead. First strict improvement wins ties.
ConeEstimate step2_refine(const DirectionalSupport& ds, const ConicalSet& step1, const ShiftGrid& grid, double c0,
                          bool strict_width = false);

/// tau_{m+1} - tau_m > (R_{m+1} + R_m) / c0 for each consecutive pair (cones sorted by tau).
std::vector<bool> check_wscc(const std::vector<ConicalSet>& cones, double c0);

/// Support bound of step (I) intersected with step (II).
inline bool support_bound_contains(const ConeEstimate& e, const SpaceTimePoint& p, double c0) {
    return intersection_contains(e.step1, e.step2, p, c0);
}

struct CsaResult {
    SeparationResult separation;
    std::vector<DirectionalSupport> supports;
    std::vector<ConeEstimate> estimates;
    std::vector<bool> wscc;
};

CsaResult run_csa(const FarFieldMatrix& g, const CsaParams& params = {});

}  // namespace conesupport
