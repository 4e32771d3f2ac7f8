#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "kbarrier/coverage.hpp"
#include "kbarrier/dataset.hpp"
#include "kbarrier/deployment.hpp"
#include "kbarrier/rng.hpp"

namespace kbtest {

using kbarrier::Point;

/// Small random field used by the oracle suites: 3..max_n sensors in a
/// 40 m disk, sensing range drawn from {10, 15, 20, 25}.
inline kbarrier::coverage::CoverageGraph random_small_graph(std::uint64_t seed, int max_n,
                                                            kbarrier::deployment::Distribution dist) {
    namespace dep = kbarrier::deployment;
    kbarrier::rng::Engine eng(kbarrier::rng::derive_seed(seed, 0xF1E1D, 0));
    dep::DeploymentSpec spec;
    spec.region.radius_m = 40.0;
    spec.n_sensors = 3 + static_cast<int>(kbarrier::rng::bounded(eng, static_cast<std::uint64_t>(max_n - 2)));
    spec.distribution = dist;
    spec.seed = eng();
    static constexpr double kRs[] = {10.0, 15.0, 20.0, 25.0};
    const double rs = kRs[kbarrier::rng::bounded(eng, 4)];
    return kbarrier::coverage::build_coverage_graph(dep::make_field(spec, rs, 2.0 * rs),
                                                    kbarrier::Execution::serial);
}

/// Eight sensors on two concentric squares, each square a closed ring around
/// the center under a 30 m link threshold.
inline std::vector<Point> double_ring() {
    std::vector<Point> p;
    for (int i = 0; i < 4; ++i) {
        const double a = kbarrier::kPi / 2.0 * i + 0.2;
        p.push_back({10.0 * std::cos(a), 10.0 * std::sin(a)});
    }
    for (int i = 0; i < 4; ++i) {
        const double a = kbarrier::kPi / 2.0 * i + 0.2 + kbarrier::kPi / 4.0;
        p.push_back({21.0 * std::cos(a), 21.0 * std::sin(a)});
    }
    return p;
}

inline kbarrier::dataset::Sample sample(double area, double rs, double tx, int n, double k) {
    kbarrier::dataset::Sample s;
    s.area_m2 = area;
    s.sensing_range_m = rs;
    s.tx_range_m = tx;
    s.n_sensors = n;
    s.barriers = k;
    return s;
}

}  // namespace kbtest
