#include "kbarrier/timing.hpp"

#include <chrono>
#include <ostream>

#include "kbarrier/coverage.hpp"
#include "kbarrier/error.hpp"
#include "kbarrier/rng.hpp"

namespace kbarrier::timing {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void BenchConfig::validate() const {
    if (sensor_counts.empty()) throw ValidationError("bench needs at least one sensor count");
    for (int n : sensor_counts)
        if (n < 1) throw ValidationError("bench sensor counts must be >= 1");
    if (trials < 1) throw ValidationError("bench trials must be >= 1");
    if (forward_reps < 1) throw ValidationError("bench forward_reps must be >= 1");
    if (!(radius_m > 0.0) || !(sensing_range_m > 0.0)) throw ValidationError("bench geometry must be positive");
    if (tx_range_m < 2.0 * sensing_range_m) throw ValidationError("bench Rtx must be at least 2 Rs");
}

std::vector<BenchRow> run_bench(const BenchConfig& config, const mlp::MlpModel& model) {
    config.validate();
    model.validate();
    std::vector<BenchRow> rows;
    for (std::size_t c = 0; c < config.sensor_counts.size(); ++c) {
        BenchRow row{"monte_carlo", config.sensor_counts[c], config.trials, 0.0, 0.0};
        double barriers = 0.0;
        const auto t0 = Clock::now();
        for (int t = 0; t < config.trials; ++t) {
            deployment::DeploymentSpec spec;
            spec.region.radius_m = config.radius_m;
            spec.n_sensors = config.sensor_counts[c];
            spec.distribution = config.distribution;
            spec.seed = rng::derive_seed(config.seed, c, static_cast<std::uint64_t>(t));
            const auto field = deployment::make_field(spec, config.sensing_range_m, config.tx_range_m);
            const auto graph = coverage::build_coverage_graph(field, Execution::serial);
            barriers += coverage::count_barriers(graph, config.limits).k;
        }
        row.seconds_per_eval = seconds_since(t0) / config.trials;
        row.mean_barriers = barriers / config.trials;
        rows.push_back(row);
    }

    const double area = kPi * config.radius_m * config.radius_m;
    const dataset::Features x{area, config.sensing_range_m, config.tx_range_m,
                              static_cast<double>(config.sensor_counts.front())};
    volatile double sink = 0.0;
    const auto t0 = Clock::now();
    for (int r = 0; r < config.forward_reps; ++r) sink = sink + model.predict(x);
    rows.push_back({"surrogate", 0, config.forward_reps, seconds_since(t0) / config.forward_reps, 0.0});
    return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    const auto old = out.precision(9);
    out << "task,sensors,evaluations,seconds_per_eval,mean_barriers\n";
    for (const BenchRow& r : rows)
        out << r.task << ',' << r.sensors << ',' << r.evaluations << ',' << r.seconds_per_eval << ','
            << r.mean_barriers << '\n';
    out.precision(old);
}

}  // namespace kbarrier::timing
