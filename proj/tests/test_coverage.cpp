#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "kbarrier/coverage.hpp"
#include "kbarrier/error.hpp"
#include "support.hpp"

using namespace kbarrier;
using namespace kbarrier::coverage;
using deployment::Distribution;

namespace {

// Independent witness check: edges present, cycles disjoint, and the summed
// signed subtended angle is +-2 pi.
void check_witness(const CoverageGraph& g, const BarrierCount& c) {
    REQUIRE(static_cast<int>(c.witness.size()) == c.k);
    std::set<int> used;
    for (const auto& cycle : c.witness) {
        REQUIRE(cycle.size() >= 3);
        double total = 0.0;
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            const Point a = g.positions[static_cast<std::size_t>(cycle[i])];
            const Point b = g.positions[static_cast<std::size_t>(cycle[(i + 1) % cycle.size()])];
            CHECK(distance(a, b) <= g.link_threshold);
            total += std::atan2(cross(a, b), dot(a, b));
            CHECK(used.insert(cycle[i]).second);
        }
        CHECK(std::abs(std::abs(total) - 2.0 * kPi) < 1e-9);
    }
}

}  // namespace

TEST_CASE("binary sensing model is boundary inclusive") {
    CHECK(is_covered({10, 0}, {0, 0}, 15));
    CHECK(is_covered({15, 0}, {0, 0}, 15));
    CHECK_FALSE(is_covered({15.000001, 0}, {0, 0}, 15));
}

TEST_CASE("edges exist exactly up to 2 Rs") {
    const double rs = 15.0;
    const std::vector<Point> touching{{10, 5}, {10 + 2 * rs, 5}};
    CHECK(build_graph(touching, 2 * rs).edges.size() == 1);
    const std::vector<Point> apart{{10, 5}, {10 + 2 * rs + 1e-6, 5}};
    CHECK(build_graph(apart, 2 * rs).edges.empty());
}

TEST_CASE("link threshold is min(2 Rs, Rtx)") {
    deployment::SensorField f;
    f.region.radius_m = 40;
    f.positions = {{1, 1}, {2, 2}};
    f.sensing_range_m = 10;
    f.tx_range_m = 50;
    CHECK(build_coverage_graph(f).link_threshold == 20.0);
}

TEST_CASE("sensor at the center is degenerate") {
    deployment::SensorField f;
    f.region.radius_m = 40;
    f.positions = {{0, 0}, {5, 5}};
    CHECK_THROWS_AS(build_coverage_graph(f), GeometryError);
}

TEST_CASE("trivial counts") {
    CHECK(count_barriers(build_graph(std::vector<Point>{}, 30)).k == 0);
    const std::vector<Point> far{{30, 0}, {-30, 1}, {0, 35}, {1, -35}, {20, 20}};
    const auto edgeless = build_graph(far, 10);
    CHECK(edgeless.edges.empty());
    CHECK(count_barriers(edgeless).k == 0);
    CHECK(brute_force_barriers(edgeless).k == 0);
}

TEST_CASE("a single ring and a triangle each give one barrier") {
    std::vector<Point> ring;
    for (int i = 0; i < 8; ++i) ring.push_back({25 * std::cos(i * kPi / 4 + 0.1), 25 * std::sin(i * kPi / 4 + 0.1)});
    const auto g = build_graph(ring, 20.0);
    const auto c = count_barriers(g);
    CHECK(c.k == 1);
    CHECK(c.exact);
    check_witness(g, c);

    const std::vector<Point> tri{{10, 1}, {-5, 9}, {-5, -9}};
    CHECK(brute_force_barriers(build_graph(tri, 30)).k == 1);
}

TEST_CASE("double ring holds two disjoint 4-cycles") {
    const auto g = build_graph(kbtest::double_ring(), 30.0);
    const auto brute = brute_force_barriers(g);
    const auto c = count_barriers(g);
    CHECK(brute.k == 2);
    CHECK(c.k == 2);
    check_witness(g, c);
    // The two squares themselves are winding cycles.
    for (int base : {0, 4}) {
        const std::vector<int> square{base, base + 1, base + 2, base + 3};
        CHECK(std::abs(winding_number(g, square)) == 1);
    }
}

TEST_CASE("cut-ray flow only bounds the packing from above") {
    // Five mutually adjacent sensors: any two winding cycles would need six
    // vertices, yet the single-ray flow routes two units.
    std::vector<Point> k5;
    for (double deg : {10.0, 82.0, 154.0, 226.0, 298.0})
        k5.push_back({10 * std::cos(deg * kPi / 180), 10 * std::sin(deg * kPi / 180)});
    const auto g = build_graph(k5, 30.0);
    CHECK(brute_force_barriers(g).k == 1);
    CHECK(count_barriers(g).k == 1);
    CHECK(cut_ray_flow(g) >= 1);
}

TEST_CASE("max_barrier_paths") {
    CHECK(max_barrier_paths(100, 2) == 50);
    CHECK(max_barrier_paths(7, 3) == 2);
    CHECK(max_barrier_paths(3, 5) == 0);
    CHECK_THROWS_AS(max_barrier_paths(3, 0), ValidationError);
}

TEST_CASE("brute force refuses large graphs") {
    std::vector<Point> p;
    for (int i = 0; i < kBruteForceMaxVertices + 1; ++i) p.push_back({20 + i * 0.5, 3.0 + i});
    CHECK_THROWS_AS(brute_force_barriers(build_graph(p, 10)), BudgetError);
}

TEST_CASE("oracle equivalence on random small fields") {
    int nonzero = 0;
    for (auto dist : {Distribution::uniform, Distribution::gaussian}) {
        for (std::uint64_t seed = 0; seed < 150; ++seed) {
            const auto g = kbtest::random_small_graph(seed, 12, dist);
            const auto brute = brute_force_barriers(g);
            const auto fast = count_barriers(g);
            CAPTURE(seed);
            REQUIRE(fast.exact);
            CHECK(fast.k == brute.k);
            CHECK(fast.k <= g.vertex_count / 3);
            CHECK(fast.k <= max_barrier_paths(g.vertex_count, 3));
            check_witness(g, fast);
            nonzero += fast.k > 0;
        }
    }
    CHECK(nonzero > 30);  // the suite is not trivially all-zero
}

TEST_CASE("monotonicity under sensor addition and edge removal") {
    rng::Engine eng(5);
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto g = kbtest::random_small_graph(seed, 11, Distribution::gaussian);
        const int k = count_barriers(g).k;

        auto more = g.positions;
        const double r = 40.0 * std::sqrt(rng::uniform01(eng)) + 1e-3;
        const double a = 2 * kPi * rng::uniform01(eng);
        more.push_back({r * std::cos(a), r * std::sin(a)});
        CHECK(count_barriers(build_graph(more, g.link_threshold)).k >= k);

        for (std::size_t e = 0; e < g.edges.size(); e += 3)
            CHECK(count_barriers(without_edge(g, e)).k <= k);
    }
}

TEST_CASE("large fields respect the bound and report exactness honestly") {
    deployment::DeploymentSpec s;
    s.region.radius_m = 60;
    s.n_sensors = 200;
    s.distribution = Distribution::uniform;
    s.seed = 3;
    const auto g = build_coverage_graph(deployment::make_field(s, 15, 30));
    const auto c = count_barriers(g, {100'000, 2'000'000});
    CHECK(c.k <= c.upper_bound);
    CHECK(c.upper_bound <= g.vertex_count / 3);
    if (c.exact) CHECK(c.k == c.upper_bound);
    check_witness(g, c);
}

TEST_CASE("edge and witness export") {
    const auto g = build_graph(kbtest::double_ring(), 30.0);
    std::ostringstream edges;
    write_edges_csv(edges, g);
    CHECK(edges.str().rfind("i,j,crossing_sign\n", 0) == 0);
    std::ostringstream w;
    write_witness_json(w, count_barriers(g));
    CHECK(w.str().front() == '[');
}
