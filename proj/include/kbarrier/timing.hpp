#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kbarrier/deployment.hpp"
#include "kbarrier/mlp.hpp"

namespace kbarrier::timing {

/// Monte Carlo cells versus one surrogate prediction. The defaults give an
/// area of 5000 m^2 with Rs = 15 m and Rtx = 30 m.
struct BenchConfig {
    std::vector<int> sensor_counts{100, 200, 300};
    double radius_m = 39.894228040143268;  // sqrt(5000 / pi)
    double sensing_range_m = 15.0;
    double tx_range_m = 30.0;
    deployment::Distribution distribution = deployment::Distribution::gaussian;
    int trials = 10;
    std::uint64_t seed = 1;
    int forward_reps = 20000;
    coverage::SearchLimits limits{100'000, 1'000'000, 500};

    void validate() const;
};

struct BenchRow {
    std::string task;  // "monte_carlo" or "surrogate"
    int sensors = 0;   // 0 for the surrogate row
    int evaluations = 0;
    double seconds_per_eval = 0.0;
    double mean_barriers = 0.0;  // Monte Carlo rows only
};

/// Times deployment + graph + barrier count per trial (serial, one thread)
/// and `forward_reps` surrogate predictions of `model`.
std::vector<BenchRow> run_bench(const BenchConfig& config, const mlp::MlpModel& model);

/// `task,sensors,evaluations,seconds_per_eval,mean_barriers`.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace kbarrier::timing
