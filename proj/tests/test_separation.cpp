#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "conesupport/noise.hpp"
#include "conesupport/separation.hpp"
#include "conesupport/sphere_mesh.hpp"

using namespace conesupport;

namespace {

const GaussianPointSource f1{{1.2, 0.0, 0.0}, -1.3};
const GaussianPointSource f2{{-0.4, 0.4, -0.4}, 2.5};

std::vector<double> row_with(std::size_t n, const std::vector<std::size_t>& hot, double value = 1.0) {
    std::vector<double> r(n, 0.0);
    for (auto k : hot) r[k] = value;
    return r;
}

std::set<std::pair<std::size_t, std::size_t>> as_set(const SupportComponent& c) {
    return {c.members.begin(), c.members.end()};
}

}  // namespace

TEST_CASE("threshold estimation") {
    const auto mesh = build_mesh(2, 3);
    FarFieldMatrix g(TimeGrid{50, 0.0, 1.0}, mesh);
    g.at(0, 0) = 0.05;
    g.at(0, 1) = -0.08;
    g.at(0, 2) = 0.03;
    g.at(1, 30) = 2.0;
    const auto thr = estimate_thresholds(g, 20, 1.2);
    CHECK(thr.level[0] == doctest::Approx(0.096));
    CHECK(thr.floor == doctest::Approx(1e-9 * 3.0));
    for (std::size_t m = 1; m < 6; ++m) CHECK(thr.level[m] == thr.floor);
    CHECK_THROWS_AS(estimate_thresholds(g, 51, 1.2), std::invalid_argument);
}

TEST_CASE("per-receiver intervals") {
    const TimeGrid grid{101, 0.0, 2.0};  // dt = 0.02
    CHECK(per_receiver_intervals(row_with(101, {}), grid, 0.5, 0.08).empty());

    const auto single = per_receiver_intervals(row_with(101, {50}), grid, 0.5, 0.08);
    REQUIRE(single.size() == 1);
    CHECK(single[0].start == doctest::Approx(1.0));
    CHECK(single[0].end == doctest::Approx(1.0));

    std::vector<std::size_t> hot;
    for (std::size_t k = 0; k <= 20; ++k) hot.push_back(k);
    for (std::size_t k = 26; k <= 30; ++k) hot.push_back(k);
    const auto two = per_receiver_intervals(row_with(101, hot), grid, 0.5, 0.08);
    REQUIRE(two.size() == 2);
    CHECK(two[0].start == doctest::Approx(0.0));
    CHECK(two[0].end == doctest::Approx(0.4));
    CHECK(two[1].start == doctest::Approx(0.52));
    CHECK(two[1].end == doctest::Approx(0.6));

    // A gap of exactly max_gap splits; one grid step less keeps the chain.
    CHECK(per_receiver_intervals(row_with(101, {10, 14}), grid, 0.5, 0.08).size() == 2);
    CHECK(per_receiver_intervals(row_with(101, {10, 13}), grid, 0.5, 0.08).size() == 1);
    // Negative values count by magnitude.
    CHECK(per_receiver_intervals(row_with(101, {5}, -1.0), grid, 0.5, 0.08).size() == 1);
    CHECK_THROWS_AS(per_receiver_intervals(row_with(101, {5}), grid, 0.5, 0.01), std::invalid_argument);
}

TEST_CASE("components across receivers") {
    const auto mesh = build_mesh(2, 3);
    const TimeGrid grid{101, 0.0, 2.0};
    std::vector<std::vector<SampleChain>> chains(6);
    chains[0] = {{10, 14, {10, 11, 12, 13, 14}}};
    chains[1] = {{10, 14, {10, 11, 12, 13, 14}}};  // adjacent to 0
    auto comps = connect_components(chains, mesh, grid, 3);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].members.size() == 10);
    CHECK(comps[0].per_direction_intervals.size() == 2);

    chains[1].clear();
    chains[0] = {{10, 14, {10, 11, 12, 13, 14}}, {40, 44, {40, 41, 42, 43, 44}}};
    comps = connect_components(chains, mesh, grid, 3);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].first_time_index() == 10);
    CHECK(comps[1].first_time_index() == 40);

    // Small specks are dropped.
    chains[2] = {{70, 70, {70}}};
    CHECK(connect_components(chains, mesh, grid, 3).size() == 2);
    CHECK(connect_components(chains, mesh, grid, 1).size() == 3);
    CHECK_THROWS_AS(connect_components(std::vector<std::vector<SampleChain>>(5), mesh, grid, 3), std::invalid_argument);
}

TEST_CASE("directional support envelopes") {
    const auto mesh = build_mesh(2, 3);
    SupportComponent comp;
    comp.per_direction_intervals[4] = {{0.2, 0.5}, {0.1, 0.3}};
    const auto ds = directional_support(comp, mesh);
    REQUIRE(ds.entries.size() == 1);
    CHECK(ds.entries[0].direction == 4);
    CHECK(ds.entries[0].t_minus == 0.1);
    CHECK(ds.entries[0].t_plus == 0.5);
}

TEST_CASE("clean point source support matches the analytic envelope") {
    const auto mesh = build_mesh(20, 22);
    const TimeGrid grid;
    const std::vector<Source> src{f1};
    const auto g = sample_farfield_matrix(src, mesh, grid, 1.0);
    const auto sep = separate(g);
    REQUIRE(sep.components.size() == 1);
    const auto ds = directional_support(sep.components[0], mesh);
    CHECK(ds.entries.size() == 440);
    for (const auto& e : ds.entries) {
        const double centre = -1.3 - dot(e.xhat, f1.position);
        CHECK(std::abs(e.t_minus - (centre - 1.0)) <= grid.step());
        CHECK(std::abs(e.t_plus - (centre + 1.0)) <= grid.step());
    }
}

TEST_CASE("separation invariants on noisy two-source data") {
    const auto mesh = build_mesh(20, 22);
    const std::vector<Source> src{f1, f2};
    const auto g = sample_farfield_matrix(src, mesh, TimeGrid{}, 1.0);
    const auto noisy = add_relative_noise(g, {0.05, 3}).matrix;
    SeparationParams p;
    p.min_component = 1;
    const auto sep = separate(noisy, p);

    // Partition of the above-threshold samples.
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::size_t total = 0;
    for (const auto& c : sep.components) {
        total += c.members.size();
        for (const auto& mk : c.members) seen.insert(mk);
    }
    CHECK(seen.size() == total);
    std::size_t above = 0;
    for (std::size_t m = 0; m < noisy.rows(); ++m)
        for (std::size_t k = 0; k < noisy.cols(); ++k)
            if (std::abs(noisy.at(m, k)) > sep.thresholds.level[m]) ++above;
    CHECK(above == total);

    // Envelope consistency.
    for (const auto& c : sep.components) {
        std::size_t kmin = c.first_time_index(), kmax = 0;
        for (const auto& mk : c.members) kmax = std::max(kmax, mk.second);
        for (const auto& e : directional_support(c, mesh).entries) {
            CHECK(e.t_minus <= e.t_plus);
            CHECK(e.t_minus >= noisy.times.at(kmin) - 1e-12);
            CHECK(e.t_plus <= noisy.times.at(kmax) + 1e-12);
        }
    }

    // Raising thresholds only shrinks components.
    p.factor = 1.5;
    const auto tighter = separate(noisy, p);
    for (const auto& c : tighter.components) {
        const auto members = as_set(c);
        bool inside_one = false;
        for (const auto& old : sep.components) {
            const auto big = as_set(old);
            if (std::includes(big.begin(), big.end(), members.begin(), members.end())) inside_one = true;
        }
        CHECK(inside_one);
    }

    // The two sources separate once specks are dropped.
    p.factor = 1.2;
    p.min_component = 25;
    CHECK(separate(noisy, p).components.size() == 2);
    for (double a : sep.thresholds.level) {
        CHECK(a > 0.0);
        CHECK(a < 1.0);
    }
}
