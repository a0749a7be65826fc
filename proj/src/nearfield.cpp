#include "conesupport/nearfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conesupport {

namespace {

bool within(const std::vector<TimeInterval>& intervals, double s, double tol) {
    for (const auto& iv : intervals)
        if (s >= iv.start - tol && s <= iv.end + tol) return true;
    return false;
}

double lattice_coord(double lo, double hi, std::size_t n, std::size_t i) {
    if (n == 1) return 0.5 * (lo + hi);
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

std::size_t lattice_index(double lo, double hi, std::size_t n, double x) {
    if (n == 1) return 0;
    const double pos = (x - lo) / (hi - lo) * static_cast<double>(n - 1);
    return static_cast<std::size_t>(std::clamp(std::round(pos), 0.0, static_cast<double>(n - 1)));
}

void check_inputs(const TimeSupportSets& sets, const SupportGrid& grid, double c0, double tol) {
    grid.validate();
    if (!(c0 > 0.0)) throw std::invalid_argument("support mask: c0 must be positive");
    if (!(tol >= 0.0)) throw std::invalid_argument("support mask: tol must be non-negative");
    if (sets.points.size() != sets.intervals.size()) throw std::invalid_argument("support mask: inconsistent support sets");
}

}  // namespace

Vec3 SupportGrid::spatial_node(std::size_t s) const {
    const std::size_t i = s % n[0];
    const std::size_t j = (s / n[0]) % n[1];
    const std::size_t k = s / (n[0] * n[1]);
    return {lattice_coord(lo[0], hi[0], n[0], i), lattice_coord(lo[1], hi[1], n[1], j),
            lattice_coord(lo[2], hi[2], n[2], k)};
}

SpaceTimePoint SupportGrid::node(std::size_t index) const {
    const std::size_t sc = spatial_count();
    return {times.at(index / sc), spatial_node(index % sc)};
}

std::size_t SupportGrid::nearest(const SpaceTimePoint& p) const {
    const double dt = times.step();
    const auto tk = static_cast<std::size_t>(
        std::clamp(std::round((p.t - times.t_min) / dt), 0.0, static_cast<double>(times.count - 1)));
    const std::size_t i = lattice_index(lo[0], hi[0], n[0], p.x[0]);
    const std::size_t j = lattice_index(lo[1], hi[1], n[1], p.x[1]);
    const std::size_t k = lattice_index(lo[2], hi[2], n[2], p.x[2]);
    return tk * spatial_count() + (k * n[1] + j) * n[0] + i;
}

void SupportGrid::validate() const {
    times.validate();
    for (int d = 0; d < 3; ++d) {
        if (n[d] == 0) throw std::invalid_argument("support grid: zero lattice count");
        if (n[d] > 1 && !(hi[d] > lo[d])) throw std::invalid_argument("support grid: empty lattice box");
    }
}

std::size_t SupportMask4D::count() const {
    return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), std::uint8_t{1}));
}

ThresholdVector estimate_trace_thresholds(const NearFieldTrace& trace, std::size_t n_lead, double factor,
                                          double floor) {
    trace.validate();
    return estimate_row_thresholds(trace.values, trace.rows(), trace.cols(), n_lead, factor, floor);
}

TimeSupportSets time_support_sets(const NearFieldTrace& trace, const ThresholdVector& thresholds, double max_gap) {
    trace.validate();
    if (thresholds.level.size() != trace.rows()) throw std::invalid_argument("time_support_sets: threshold count mismatch");
    TimeSupportSets out;
    out.points = trace.points;
    for (std::size_t i = 0; i < trace.rows(); ++i)
        out.intervals.push_back(per_receiver_intervals(trace.row(i), trace.times, thresholds.level[i], max_gap));
    return out;
}

SupportMask4D pi_minus(const TimeSupportSets& sets, const SupportGrid& grid, double c0, double tol) {
    check_inputs(sets, grid, c0, tol);
    SupportMask4D mask{grid, std::vector<std::uint8_t>(grid.size(), 0)};
    if (sets.points.empty()) return mask;
    for (const auto& iv : sets.intervals)
        if (iv.empty()) return mask;

    std::fill(mask.flags.begin(), mask.flags.end(), std::uint8_t{1});
    const std::size_t sc = grid.spatial_count();
    // Intersect the backward-cone shells of one boundary point at a time.
    for (std::size_t p = 0; p < sets.points.size(); ++p) {
        const Vec3& y = sets.points[p];
        for (std::size_t s = 0; s < sc; ++s) {
            const Vec3 x = grid.spatial_node(s);
            const double travel = distance(x, y) / c0;
            for (std::size_t k = 0; k < grid.times.count; ++k) {
                auto& f = mask.flags[k * sc + s];
                if (f && !within(sets.intervals[p], grid.times.at(k) + travel, tol)) f = 0;
            }
        }
    }
    return mask;
}

SupportMask4D pi_plus_bruteforce(const TimeSupportSets& sets, const SupportGrid& grid, double c0, double tol) {
    check_inputs(sets, grid, c0, tol);
    SupportMask4D mask{grid, std::vector<std::uint8_t>(grid.size(), 0)};
    if (sets.points.empty()) return mask;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        const SpaceTimePoint apex = grid.node(idx);
        bool all = true;
        for (std::size_t p = 0; p < sets.points.size() && all; ++p)
            all = within(sets.intervals[p], forward_cone_crossing_time(apex, sets.points[p], c0), tol);
        mask.flags[idx] = all ? 1 : 0;
    }
    return mask;
}

}  // namespace conesupport
