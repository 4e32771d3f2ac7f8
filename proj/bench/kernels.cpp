// Serial reference vs OpenMP kernel for every parallel code path. Arg 0 is
// the serial reference, arg 1 the parallel kernel:
//
//   kbarrier_bench --benchmark_filter=Jacobian
#include <benchmark/benchmark.h>

#include "kbarrier/analysis.hpp"
#include "kbarrier/coverage.hpp"
#include "kbarrier/dataset.hpp"
#include "kbarrier/ensemble.hpp"
#include "kbarrier/mlp.hpp"
#include "kbarrier/rng.hpp"

using namespace kbarrier;

namespace {

Execution mode(const benchmark::State& state) {
    return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

deployment::SensorField field(int n) {
    deployment::DeploymentSpec s;
    s.region.radius_m = 100.0;
    s.n_sensors = n;
    s.distribution = deployment::Distribution::gaussian;
    s.seed = 1;
    return deployment::make_field(s, 20.0, 40.0);
}

Eigen::MatrixXd inputs(int rows) {
    rng::Engine eng(3);
    Eigen::MatrixXd x(rows, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 2.0 * rng::uniform01(eng) - 1.0;
    return x;
}

dataset::Dataset rows(int n) {
    rng::Engine eng(4);
    dataset::Dataset d;
    for (int i = 0; i < n; ++i) {
        dataset::Sample s;
        s.area_m2 = 5000 + 45000 * rng::uniform01(eng);
        s.sensing_range_m = 15 + 25 * rng::uniform01(eng);
        s.tx_range_m = 2 * s.sensing_range_m;
        s.n_sensors = 100 + static_cast<int>(rng::bounded(eng, 301));
        s.barriers = 30 * rng::uniform01(eng);
        d.samples.push_back(s);
    }
    return d;
}

void BM_GraphBuild(benchmark::State& state) {
    const auto f = field(400);
    for (auto _ : state) benchmark::DoNotOptimize(coverage::build_coverage_graph(f, mode(state)));
    label(state);
}
BENCHMARK(BM_GraphBuild)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ForwardBatch(benchmark::State& state) {
    const auto model = mlp::MlpModel::random({4, 20, 20, 1}, 1);
    const auto x = inputs(2000);
    for (auto _ : state) benchmark::DoNotOptimize(mlp::forward_batch(model, x, mode(state)));
    label(state);
}
BENCHMARK(BM_ForwardBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Jacobian(benchmark::State& state) {
    const auto model = mlp::MlpModel::random({4, 20, 20, 1}, 1);
    const auto x = inputs(100);  // a 55% training split of 182 rows
    for (auto _ : state) benchmark::DoNotOptimize(mlp::jacobian(model, x, mode(state)));
    label(state);
}
BENCHMARK(BM_Jacobian)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_StumpSearch(benchmark::State& state) {
    const auto d = rows(182);
    std::vector<dataset::Features> x;
    std::vector<double> y;
    for (const auto& s : d.samples) {
        x.push_back(s.features());
        y.push_back(s.barriers);
    }
    for (auto _ : state) benchmark::DoNotOptimize(ensemble::fit_stump(x, y, mode(state)));
    label(state);
}
BENCHMARK(BM_StumpSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_PdpSurface(benchmark::State& state) {
    const auto d = rows(182);
    const auto model = mlp::MlpModel::random({4, 20, 20, 1}, 2);
    const analysis::Predictor p = [&](const dataset::Features& f) { return model.predict(f); };
    for (auto _ : state) benchmark::DoNotOptimize(analysis::pdp_surface(p, d, {0, 3}, 20, mode(state)));
    label(state);
}
BENCHMARK(BM_PdpSurface)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
    dataset::SweepConfig c;
    c.radii_m = {60, 100};
    c.sensor_counts = {100};
    c.sensing_ranges_m = {15};
    c.trials_per_config = 4;
    for (auto _ : state) benchmark::DoNotOptimize(dataset::run_sweep(c, mode(state)));
    label(state);
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
