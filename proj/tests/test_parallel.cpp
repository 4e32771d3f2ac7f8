// Every OpenMP kernel against its serial reference: results must be bitwise
// identical, whatever the thread count.
#include <doctest.h>

#include "kbarrier/analysis.hpp"
#include "kbarrier/coverage.hpp"
#include "kbarrier/ensemble.hpp"
#include "kbarrier/mlp.hpp"
#include "kbarrier/rng.hpp"
#include "support.hpp"

using namespace kbarrier;

TEST_CASE("graph construction") {
    deployment::DeploymentSpec s;
    s.region.radius_m = 80;
    s.n_sensors = 400;
    s.distribution = deployment::Distribution::gaussian;
    s.seed = 12;
    const auto field = deployment::make_field(s, 20, 40);
    const auto a = coverage::build_coverage_graph(field, Execution::serial);
    const auto b = coverage::build_coverage_graph(field, Execution::parallel);
    CHECK(a.edges == b.edges);
    CHECK(a.cut_angle == b.cut_angle);
}

TEST_CASE("forward batch and Jacobian") {
    const auto m = mlp::MlpModel::random({4, 20, 20, 1}, 3);
    rng::Engine eng(1);
    Eigen::MatrixXd x(300, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 2 * rng::uniform01(eng) - 1;
    CHECK(mlp::forward_batch(m, x, Execution::serial) == mlp::forward_batch(m, x, Execution::parallel));
    CHECK(mlp::jacobian(m, x, Execution::serial) == mlp::jacobian(m, x, Execution::parallel));
}

TEST_CASE("stump search and boosting") {
    rng::Engine eng(2);
    std::vector<dataset::Features> x;
    std::vector<double> y;
    for (int i = 0; i < 200; ++i) {
        x.push_back({rng::uniform01(eng), rng::uniform01(eng), rng::uniform01(eng), rng::uniform01(eng)});
        y.push_back(x.back()[2] * 3 + rng::uniform01(eng));
    }
    const auto a = ensemble::fit_lsboost(x, y, 20, 1.0, nullptr, Execution::serial);
    const auto b = ensemble::fit_lsboost(x, y, 20, 1.0, nullptr, Execution::parallel);
    REQUIRE(a.stumps.size() == b.stumps.size());
    for (std::size_t i = 0; i < a.stumps.size(); ++i) {
        CHECK(a.stumps[i].feature_index == b.stumps[i].feature_index);
        CHECK(a.stumps[i].threshold == b.stumps[i].threshold);
        CHECK(a.stumps[i].left_value == b.stumps[i].left_value);
    }
    CHECK(a.importance == b.importance);
}

TEST_CASE("PDP grid") {
    dataset::Dataset d;
    for (int i = 0; i < 30; ++i) d.samples.push_back(kbtest::sample(5000 + 100 * i, 15 + i % 5, 40, 100 + 10 * i, 1));
    const auto m = mlp::MlpModel::random({4, 5, 1}, 9);
    const analysis::Predictor p = [&](const dataset::Features& f) { return m.predict(f); };
    const auto a = analysis::pdp_surface(p, d, {0, 3}, 20, Execution::serial);
    const auto b = analysis::pdp_surface(p, d, {0, 3}, 20, Execution::parallel);
    CHECK(a.values == b.values);
}
