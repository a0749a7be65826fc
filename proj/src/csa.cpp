#include "conesupport/csa.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace conesupport {

ConicalSet step1_bound(const DirectionalSupport& ds) {
    if (ds.empty()) throw std::invalid_argument("step1_bound: empty support");
    double t_min = std::numeric_limits<double>::infinity();
    double t_max = -std::numeric_limits<double>::infinity();
    for (const auto& e : ds.entries) {
        t_min = std::min(t_min, e.t_minus);
        t_max = std::max(t_max, e.t_plus);
    }
    return {(t_max - t_min) / 2.0, (t_max + t_min) / 2.0, {0.0, 0.0, 0.0}};
}

ShiftGrid build_shift_grid(double radius, const SphereMesh& mesh, int denominator, int max_multiple) {
    if (!(radius > 0.0)) throw std::invalid_argument("build_shift_grid: radius must be positive");
    if (denominator <= 0 || max_multiple <= 0) throw std::invalid_argument("build_shift_grid: J and j_max must be positive");
    ShiftGrid grid;
    grid.denominator = denominator;
    grid.max_multiple = max_multiple;
    grid.candidates.reserve(1 + static_cast<std::size_t>(max_multiple) * mesh.size());
    grid.candidates.push_back({0.0, 0.0, 0.0});
    for (int j = 1; j <= max_multiple; ++j) {
        const double r = static_cast<double>(j) / denominator * radius;
        for (const auto& d : mesh.directions) grid.candidates.push_back(r * d);
    }
    return grid;
}

std::pair<double, double> shifted_interval(const DirectionalSupport& ds, const Vec3& zprime, double c0) {
    if (ds.empty()) throw std::invalid_argument("shifted_interval: empty support");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& e : ds.entries) {
        const double s = dot(zprime, e.xhat) / c0;
        lo = std::min(lo, e.t_minus + s);
        hi = std::max(hi, e.t_plus + s);
    }
    return {lo, hi};
}

ConeEstimate step2_refine(const DirectionalSupport& ds, const ConicalSet& step1, const ShiftGrid& grid, double c0,
                          bool strict_width) {
    if (grid.candidates.empty()) throw std::invalid_argument("step2_refine: empty shift grid");
    ConeEstimate est;
    est.step1 = step1;
    est.step2 = step1;
    est.step2.center_space = {0.0, 0.0, 0.0};
    est.denominator = grid.denominator;
    est.max_multiple = grid.max_multiple;

    for (const auto& z : grid.candidates) {
        const auto [lo, hi] = shifted_interval(ds, z, c0);
        const double size = strict_width ? (hi - lo) / 2.0 : hi - lo;
        // Shifting by z' rounds; a candidate has to beat R* by more than that to count.
        if (size < est.step2.radius * (1.0 - 1e-12)) {
            est.step2 = {size, (hi + lo) / 2.0, z};
            est.improved = true;
        }
    }
    return est;
}

std::vector<bool> check_wscc(const std::vector<ConicalSet>& cones, double c0) {
    std::vector<bool> out;
    for (std::size_t m = 0; m + 1 < cones.size(); ++m)
        out.push_back(cones[m + 1].center_time - cones[m].center_time >
                      (cones[m + 1].radius + cones[m].radius) / c0);
    return out;
}

CsaResult run_csa(const FarFieldMatrix& g, const CsaParams& params) {
    if (!(params.c0 > 0.0)) throw std::invalid_argument("run_csa: c0 must be positive");
    CsaResult out;
    out.separation = separate(g, params.separation);
    std::vector<ConicalSet> step1s;
    for (std::size_t c = 0; c < out.separation.components.size(); ++c) {
        auto ds = directional_support(out.separation.components[c], g.mesh);
        const ConicalSet s1 = step1_bound(ds);
        ConeEstimate est;
        if (s1.radius > 0.0) {
            const auto grid = build_shift_grid(params.c0 * s1.radius, g.mesh, params.denominator, params.max_multiple);
            est = step2_refine(ds, s1, grid, params.c0, params.strict_width);
        } else {
            est.step1 = s1;
            est.step2 = s1;
            est.denominator = params.denominator;
            est.max_multiple = params.max_multiple;
        }
        est.component = c;
        step1s.push_back(s1);
        out.supports.push_back(std::move(ds));
        out.estimates.push_back(est);
    }
    // Components are ordered by first sample time; WSCC needs them ordered by center time.
    std::vector<ConicalSet> by_tau = step1s;
    std::sort(by_tau.begin(), by_tau.end(),
              [](const ConicalSet& a, const ConicalSet& b) { return a.center_time < b.center_time; });
    out.wscc = check_wscc(by_tau, params.c0);
    return out;
}

}  // namespace conesupport
