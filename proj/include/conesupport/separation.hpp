#pragma once

// Splitting a noisy far-field matrix into separately radiating events: per-receiver noise
// thresholds, above-threshold time chains per receiver, and components merged over the
// receiver adjacency graph.

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "conesupport/sphere_mesh.hpp"
#include "conesupport/wavefield.hpp"

namespace conesupport {

struct ThresholdVector {
    std::vector<double> level;  // per direction
    double floor = 0.0;
};

struct SeparationParams {
    std::size_t n_lead = 20;
    double factor = 1.2;
    double max_gap = 0.08;
    std::size_t min_component = 3;
    /// Negative selects the default 1e-9 * (1 + max|G|).
    double floor = -1.0;
};

/// Same rule on any row-major block of `rows` time series of length `cols`.
ThresholdVector estimate_row_thresholds(std::span<const double> values, std::size_t rows, std::size_t cols,
                                        std::size_t n_lead, double factor, double floor);

/// A[m] = max(factor * max_{k < n_lead} |G[m][k]|, floor).
ThresholdVector estimate_thresholds(const FarFieldMatrix& g, std::size_t n_lead = 20, double factor = 1.2,
                                    double floor = -1.0);

/// Maximal run of above-threshold samples whose consecutive members are less than max_gap apart.
struct SampleChain {
    std::size_t first = 0;
    std::size_t last = 0;
    std::vector<std::size_t> members;
};

struct TimeInterval {
    double start = 0.0;
    double end = 0.0;
    bool operator==(const TimeInterval&) const = default;
};

std::vector<SampleChain> per_receiver_chains(std::span<const double> row, const TimeGrid& grid, double threshold,
                                             double max_gap);

std::vector<TimeInterval> per_receiver_intervals(std::span<const double> row, const TimeGrid& grid, double threshold,
                                                 double max_gap);

struct SupportComponent {
    /// (direction index, time index), sorted.
    std::vector<std::pair<std::size_t, std::size_t>> members;
    std::map<std::size_t, std::vector<TimeInterval>> per_direction_intervals;

    std::size_t first_time_index() const;
};

/// Union-find over chains: chains on adjacent directions merge when their time-index ranges
/// overlap. Components with fewer than min_component samples are dropped; the rest are
/// ordered by earliest time index.
std::vector<SupportComponent> connect_components(const std::vector<std::vector<SampleChain>>& chains_per_direction,
                                                 const SphereMesh& mesh, const TimeGrid& grid,
                                                 std::size_t min_component = 3);

struct DirectionalSupportEntry {
    std::size_t direction = 0;
    Vec3 xhat{0.0, 0.0, 0.0};
    double t_minus = 0.0;
    double t_plus = 0.0;
};

/// Support functions T-(x), T+(x) on the directions a component touches.
struct DirectionalSupport {
    std::vector<DirectionalSupportEntry> entries;
    bool empty() const { return entries.empty(); }
};

DirectionalSupport directional_support(const SupportComponent& comp, const SphereMesh& mesh);

struct SeparationResult {
    ThresholdVector thresholds;
    std::vector<SupportComponent> components;
};

SeparationResult separate(const FarFieldMatrix& g, const SeparationParams& params = {});

}  // namespace conesupport
