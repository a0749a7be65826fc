#include "conesupport/separation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace conesupport {

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

ThresholdVector estimate_row_thresholds(std::span<const double> values, std::size_t rows, std::size_t cols,
                                        std::size_t n_lead, double factor, double floor) {
    if (values.size() != rows * cols) throw std::invalid_argument("estimate_thresholds: size mismatch");
    if (n_lead > cols) throw std::invalid_argument("estimate_thresholds: n_lead exceeds the time count");
    if (floor < 0.0) {
        double peak = 0.0;
        for (double v : values) peak = std::max(peak, std::abs(v));
        floor = 1e-9 * (1.0 + peak);
    }
    ThresholdVector out;
    out.floor = floor;
    out.level.reserve(rows);
    for (std::size_t m = 0; m < rows; ++m) {
        double lead = 0.0;
        for (std::size_t k = 0; k < n_lead; ++k) lead = std::max(lead, std::abs(values[m * cols + k]));
        out.level.push_back(std::max(factor * lead, floor));
    }
    return out;
}

ThresholdVector estimate_thresholds(const FarFieldMatrix& g, std::size_t n_lead, double factor, double floor) {
    g.validate();
    return estimate_row_thresholds(g.values, g.rows(), g.cols(), n_lead, factor, floor);
}

std::vector<SampleChain> per_receiver_chains(std::span<const double> row, const TimeGrid& grid, double threshold,
                                             double max_gap) {
    const double dt = grid.step();
    if (max_gap < dt * (1.0 - 1e-12)) throw std::invalid_argument("per_receiver_chains: max_gap below the time step");
    const double limit = max_gap * (1.0 - 1e-12);

    std::vector<SampleChain> chains;
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (!(std::abs(row[k]) > threshold)) continue;
        if (!chains.empty() && static_cast<double>(k - chains.back().last) * dt < limit) {
            chains.back().last = k;
            chains.back().members.push_back(k);
        } else {
            chains.push_back({k, k, {k}});
        }
    }
    return chains;
}

std::vector<TimeInterval> per_receiver_intervals(std::span<const double> row, const TimeGrid& grid, double threshold,
                                                 double max_gap) {
    std::vector<TimeInterval> out;
    for (const auto& c : per_receiver_chains(row, grid, threshold, max_gap))
        out.push_back({grid.at(c.first), grid.at(c.last)});
    return out;
}

std::size_t SupportComponent::first_time_index() const {
    std::size_t best = static_cast<std::size_t>(-1);
    for (const auto& [m, k] : members) best = std::min(best, k);
    return best;
}

std::vector<SupportComponent> connect_components(const std::vector<std::vector<SampleChain>>& chains_per_direction,
                                                 const SphereMesh& mesh, const TimeGrid& grid,
                                                 std::size_t min_component) {
    if (chains_per_direction.size() != mesh.size())
        throw std::invalid_argument("connect_components: chain lists do not match the mesh");

    std::vector<std::size_t> offset(mesh.size() + 1, 0);
    for (std::size_t m = 0; m < mesh.size(); ++m) offset[m + 1] = offset[m] + chains_per_direction[m].size();
    UnionFind uf(offset.back());

    for (std::size_t m = 0; m < mesh.size(); ++m) {
        for (std::size_t n : mesh.adjacency[m]) {
            if (n <= m) continue;
            const auto& a = chains_per_direction[m];
            const auto& b = chains_per_direction[n];
            for (std::size_t i = 0; i < a.size(); ++i)
                for (std::size_t j = 0; j < b.size(); ++j)
                    if (a[i].first <= b[j].last && b[j].first <= a[i].last) uf.unite(offset[m] + i, offset[n] + j);
        }
    }

    std::map<std::size_t, SupportComponent> by_root;
    for (std::size_t m = 0; m < mesh.size(); ++m) {
        for (std::size_t i = 0; i < chains_per_direction[m].size(); ++i) {
            const auto& chain = chains_per_direction[m][i];
            auto& comp = by_root[uf.find(offset[m] + i)];
            for (std::size_t k : chain.members) comp.members.emplace_back(m, k);
            comp.per_direction_intervals[m].push_back({grid.at(chain.first), grid.at(chain.last)});
        }
    }

    std::vector<SupportComponent> out;
    for (auto& [root, comp] : by_root) {
        if (comp.members.size() < min_component) continue;
        std::sort(comp.members.begin(), comp.members.end());
        out.push_back(std::move(comp));
    }
    std::stable_sort(out.begin(), out.end(), [](const SupportComponent& a, const SupportComponent& b) {
        return a.first_time_index() < b.first_time_index();
    });
    return out;
}

DirectionalSupport directional_support(const SupportComponent& comp, const SphereMesh& mesh) {
    DirectionalSupport ds;
    for (const auto& [m, intervals] : comp.per_direction_intervals) {
        if (intervals.empty()) continue;
        DirectionalSupportEntry e{m, mesh.directions.at(m), intervals.front().start, intervals.front().end};
        for (const auto& iv : intervals) {
            e.t_minus = std::min(e.t_minus, iv.start);
            e.t_plus = std::max(e.t_plus, iv.end);
        }
        ds.entries.push_back(e);
    }
    return ds;
}

SeparationResult separate(const FarFieldMatrix& g, const SeparationParams& params) {
    SeparationResult out;
    out.thresholds = estimate_thresholds(g, params.n_lead, params.factor, params.floor);
    std::vector<std::vector<SampleChain>> chains(g.rows());
    for (std::size_t m = 0; m < g.rows(); ++m)
        chains[m] = per_receiver_chains(g.row(m), g.times, out.thresholds.level[m], params.max_gap);
    out.components = connect_components(chains, g.mesh, g.times, params.min_component);
    return out;
}

}  // namespace conesupport
