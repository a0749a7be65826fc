#pragma once

// Source support bounds from near-field traces on a measurement surface: the time supports
// I(g, y), the backward-cone intersection Pi-, and a brute-force forward-cone evaluation of
// Pi+ used as an oracle (the two sets coincide).

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "conesupport/geometry.hpp"
#include "conesupport/separation.hpp"
#include "conesupport/wavefield.hpp"

namespace conesupport {

struct TimeSupportSets {
    std::vector<Vec3> points;
    std::vector<std::vector<TimeInterval>> intervals;  // per point, sorted and disjoint
};

/// Candidate nodes: time grid x regular spatial lattice over the box [lo, hi].
struct SupportGrid {
    TimeGrid times;
    Vec3 lo{0.0, 0.0, 0.0};
    Vec3 hi{0.0, 0.0, 0.0};
    std::array<std::size_t, 3> n{1, 1, 1};

    std::size_t spatial_count() const { return n[0] * n[1] * n[2]; }
    std::size_t size() const { return times.count * spatial_count(); }
    Vec3 spatial_node(std::size_t s) const;
    SpaceTimePoint node(std::size_t index) const;  // index = time_index * spatial_count + spatial_index
    std::size_t nearest(const SpaceTimePoint& p) const;
    void validate() const;
};

struct SupportMask4D {
    SupportGrid grid;
    std::vector<std::uint8_t> flags;

    std::size_t count() const;
    bool operator==(const SupportMask4D& other) const { return flags == other.flags; }
};

TimeSupportSets time_support_sets(const NearFieldTrace& trace, const ThresholdVector& thresholds, double max_gap);

ThresholdVector estimate_trace_thresholds(const NearFieldTrace& trace, std::size_t n_lead = 20, double factor = 1.2,
                                          double floor = -1.0);

/// Node (t, x) is kept iff t + |x - y|/c0 lies within tol of I(g, y) for every boundary point y.
SupportMask4D pi_minus(const TimeSupportSets& sets, const SupportGrid& grid, double c0, double tol);

/// Node (t, x) is kept iff every forward-cone crossing time at a boundary point lies within tol of
/// I(g, y). Evaluated node by node through forward_cone_crossing_time.
SupportMask4D pi_plus_bruteforce(const TimeSupportSets& sets, const SupportGrid& grid, double c0, double tol);

}  // namespace conesupport
