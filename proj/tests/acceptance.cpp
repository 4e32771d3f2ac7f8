// Acceptance checks, one line per criterion:
//
//   kbarrier_acceptance                 all criteria
//   kbarrier_acceptance --criterion 3   a single one (exit 0 pass, 1 fail, 77 blocked)
//
// Criteria 3-6 need the published 182-row tables, read from
// $KBARRIER_PUBLISHED_DIR/{gaussian,uniform}.csv. Without them they report
// BLOCKED and exit 77 rather than substituting other data.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kbarrier/analysis.hpp"
#include "kbarrier/coverage.hpp"
#include "kbarrier/dataset.hpp"
#include "kbarrier/ensemble.hpp"
#include "kbarrier/error.hpp"
#include "kbarrier/mlp.hpp"
#include "kbarrier/rng.hpp"
#include "kbarrier/timing.hpp"
#include "support.hpp"

using namespace kbarrier;
using deployment::Distribution;

namespace {

// ---- pinned tolerances ----------------------------------------------------------
constexpr int kOracleFieldsPerDistribution = 150;  // >= 200 in total
constexpr int kOracleMaxSensors = 12;
constexpr int kJacobianNets = 20;
constexpr double kJacobianStep = 1e-6;
constexpr double kJacobianMaxRelError = 1e-5;
constexpr double kMinOverallR = 0.70;
constexpr double kRmseFactor = 1.25;
constexpr double kPaperRmseGaussian = 41.15;
constexpr double kPaperRmseUniform = 48.36;
constexpr int kRestarts = 10;
constexpr std::uint32_t kSplitSeed = 1;
constexpr std::uint64_t kInitSeed = 1;
constexpr int kBoostRounds = 100;
constexpr double kBoostRate = 1.0;
constexpr double kImportanceBand = 0.10;
constexpr int kPdpGrid = 20;
constexpr int kUniformPoints = 100000;
constexpr int kAnnuli = 10;
constexpr double kChiSquareCritical = 21.666;  // chi^2, 9 dof, alpha = 0.01
constexpr int kGaussianPoints = 100000;
constexpr double kVarianceBand = 0.05;
constexpr double kSurrogateSpeedup = 100.0;

enum class Outcome { pass, fail, blocked };

struct Result {
    Outcome outcome;
    std::string detail;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

Result verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

// ---- published data -------------------------------------------------------------

struct Published {
    dataset::Dataset gaussian;
    dataset::Dataset uniform;
};

std::optional<Published> load_published(std::string& why) {
    const char* dir = std::getenv("KBARRIER_PUBLISHED_DIR");
    if (!dir || !*dir) {
        why = "published dataset not available (set KBARRIER_PUBLISHED_DIR to a directory with gaussian.csv and uniform.csv)";
        return std::nullopt;
    }
    const std::filesystem::path base(dir);
    try {
        return Published{dataset::ingest_csv((base / "gaussian.csv").string(), Distribution::gaussian),
                         dataset::ingest_csv((base / "uniform.csv").string(), Distribution::uniform)};
    } catch (const Error& e) {
        why = std::string("published dataset unreadable: ") + e.what();
        return std::nullopt;
    }
}

analysis::MetricsReport overall_metrics(const mlp::MlpModel& model, const dataset::Dataset& data) {
    std::vector<double> obs;
    for (const auto& s : data.samples) obs.push_back(s.barriers);
    const auto pred = mlp::predict(model, data);
    return analysis::metrics(obs, pred);
}

mlp::TrainResult train(const dataset::Dataset& raw, std::vector<int> hidden) {
    mlp::TrainConfig cfg;
    cfg.hidden_layers = std::move(hidden);
    cfg.restarts = kRestarts;
    cfg.init_seed = kInitSeed;
    return mlp::train_lm(dataset::split(raw, kSplitSeed), cfg);
}

// ---- criteria -------------------------------------------------------------------

Result criterion1() {
    int fields = 0, mismatches = 0, inexact = 0, nonzero = 0;
    for (auto dist : {Distribution::uniform, Distribution::gaussian}) {
        for (int s = 0; s < kOracleFieldsPerDistribution; ++s) {
            const auto g = kbtest::random_small_graph(0xACCE55 + static_cast<std::uint64_t>(s), kOracleMaxSensors, dist);
            const auto fast = coverage::count_barriers(g);
            const auto brute = coverage::brute_force_barriers(g);
            ++fields;
            mismatches += fast.k != brute.k;
            inexact += !fast.exact;
            nonzero += brute.k > 0;
        }
    }
    return verdict(mismatches == 0 && inexact == 0 && fields >= 200,
                   std::to_string(fields) + " fields, " + std::to_string(mismatches) + " mismatches, " +
                       std::to_string(inexact) + " inexact, " + std::to_string(nonzero) + " with k>0");
}

Result criterion2() {
    double worst = 0.0;
    for (int net = 0; net < kJacobianNets; ++net) {
        const auto model = mlp::MlpModel::random({4, 3, 2, 1}, 1000 + static_cast<std::uint64_t>(net));
        rng::Engine eng(static_cast<std::uint64_t>(net));
        Eigen::MatrixXd x(4, 4);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 2.0 * rng::uniform01(eng) - 1.0;
        const Eigen::MatrixXd j = mlp::jacobian(model, x);
        const Eigen::VectorXd w = model.parameters();
        auto probe = model;
        for (Eigen::Index p = 0; p < w.size(); ++p) {
            Eigen::VectorXd up = w, down = w;
            up(p) += kJacobianStep;
            down(p) -= kJacobianStep;
            probe.set_parameters(up);
            const Eigen::VectorXd yu = mlp::forward_batch(probe, x, Execution::serial);
            probe.set_parameters(down);
            const Eigen::VectorXd yd = mlp::forward_batch(probe, x, Execution::serial);
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                const double fd = (yu(i) - yd(i)) / (2.0 * kJacobianStep);
                worst = std::max(worst, std::abs(fd - j(i, p)) / std::max(1.0, std::abs(fd)));
            }
        }
    }
    return verdict(worst < kJacobianMaxRelError, "max relative error " + fmt(worst, 3) + " over " +
                                                     std::to_string(kJacobianNets) + " 4:3:2:1 nets");
}

Result criterion3(const Published& pub) {
    std::string detail;
    bool ok = true;
    for (const auto* d : {&pub.gaussian, &pub.uniform}) {
        const bool gauss = d == &pub.gaussian;
        const auto m = overall_metrics(train(*d, {20, 20}).model, *d);
        const double rmse_cap = kRmseFactor * (gauss ? kPaperRmseGaussian : kPaperRmseUniform);
        ok = ok && m.r >= kMinOverallR && m.rmse <= rmse_cap;
        detail += std::string(gauss ? "gaussian" : "uniform") + " R=" + fmt(m.r) + " RMSE=" + fmt(m.rmse) +
                  " (cap " + fmt(rmse_cap) + ")  ";
    }
    return verdict(ok, detail);
}

Result criterion4(const Published& pub) {
    std::string detail;
    bool ok = true;
    for (const auto* d : {&pub.gaussian, &pub.uniform}) {
        const double two = overall_metrics(train(*d, {20, 20}).model, *d).r;
        const double one = overall_metrics(train(*d, {20}).model, *d).r;
        ok = ok && two > one;
        detail += std::string(d == &pub.gaussian ? "gaussian" : "uniform") + " R(4:20:20:1)=" + fmt(two) +
                  " R(4:20:1)=" + fmt(one) + "  ";
    }
    return verdict(ok, detail);
}

Result criterion5(const Published& pub) {
    std::string detail;
    bool ok = true;
    for (const auto* d : {&pub.gaussian, &pub.uniform}) {
        const auto imp = ensemble::feature_importance(ensemble::fit_lsboost(*d, kBoostRounds, kBoostRate));
        const double rest_min = std::min({imp[1], imp[2], imp[3]});
        const double rest_max = std::max({imp[1], imp[2], imp[3]});
        ok = ok && imp[0] < rest_min && rest_max - rest_min <= kImportanceBand * rest_max;
        detail += std::string(d == &pub.gaussian ? "gaussian" : "uniform") + " (" + fmt(imp[0], 3) + "," +
                  fmt(imp[1], 3) + "," + fmt(imp[2], 3) + "," + fmt(imp[3], 3) + ")  ";
    }
    return verdict(ok, detail);
}

// Slope along a feature: mean of its finite-difference slopes over the three
// PDP surfaces in which it appears.
std::array<double, 4> pdp_slopes(const mlp::MlpModel& model, const dataset::Dataset& data) {
    const analysis::Predictor p = [&](const dataset::Features& x) { return model.predict(x); };
    std::array<double, 4> sum{};
    for (auto [a, b] : analysis::feature_pairs()) {
        const auto s = analysis::pdp_surface(p, data, {a, b}, kPdpGrid);
        sum[static_cast<std::size_t>(a)] += s.mean_slope_x() / 3.0;
        sum[static_cast<std::size_t>(b)] += s.mean_slope_y() / 3.0;
    }
    return sum;
}

Result criterion6(const Published& pub) {
    std::string detail;
    bool ok = true;
    for (const auto* d : {&pub.gaussian, &pub.uniform}) {
        const auto s = pdp_slopes(train(*d, {20, 20}).model, *d);
        ok = ok && s[0] < 0 && s[1] > 0 && s[2] > 0 && s[3] > 0;
        detail += std::string(d == &pub.gaussian ? "gaussian" : "uniform") + " slopes (" + fmt(s[0], 3) + "," +
                  fmt(s[1], 3) + "," + fmt(s[2], 3) + "," + fmt(s[3], 3) + ")  ";
    }
    return verdict(ok, detail);
}

Result criterion7() {
    deployment::DeploymentSpec u;
    u.region.radius_m = 100.0;
    u.n_sensors = kUniformPoints;
    u.distribution = Distribution::uniform;
    u.seed = 1;
    std::array<double, kAnnuli> observed{};
    for (Point p : deployment::sample(u)) {
        const auto bin = static_cast<std::size_t>(std::min<double>(kAnnuli - 1, std::floor(kAnnuli * std::pow(norm(p) / 100.0, 2))));
        ++observed[bin];
    }
    // Annuli of equal area: expected count is uniform across bins.
    const double expected = static_cast<double>(kUniformPoints) / kAnnuli;
    double chi2 = 0.0;
    for (double o : observed) chi2 += (o - expected) * (o - expected) / expected;

    deployment::DeploymentSpec g;
    g.region.radius_m = 100.0;
    g.n_sensors = kGaussianPoints;
    g.distribution = Distribution::gaussian;
    g.sigma_x = g.sigma_y = 25.0;
    g.seed = 1;
    const auto pts = deployment::sample(g);
    double sx = 0, sy = 0, sxx = 0, syy = 0;
    for (Point p : pts) sx += p.x, sy += p.y, sxx += p.x * p.x, syy += p.y * p.y;
    const double n = static_cast<double>(pts.size());
    const double vx = (sxx - sx * sx / n) / (n - 1), vy = (syy - sy * sy / n) / (n - 1);
    const double sigma2 = 25.0 * 25.0;
    const bool var_ok = std::abs(vx / sigma2 - 1) <= kVarianceBand && std::abs(vy / sigma2 - 1) <= kVarianceBand;
    return verdict(chi2 < kChiSquareCritical && var_ok,
                   "chi2=" + fmt(chi2) + " (<" + fmt(kChiSquareCritical) + "), var/sigma^2 = " + fmt(vx / sigma2) +
                       ", " + fmt(vy / sigma2));
}

Result criterion8() {
    std::vector<std::string> failed;
    auto check = [&](const std::string& name, bool ok) {
        if (!ok) failed.push_back(name);
    };

    // Sampler and sweep determinism (including execution order).
    {
        deployment::DeploymentSpec s;
        s.n_sensors = 500;
        s.seed = 77;
        s.distribution = Distribution::gaussian;
        check("sampler determinism", deployment::sample(s) == deployment::sample(s));
        dataset::SweepConfig c;
        c.radii_m = {40, 80};
        c.sensor_counts = {100};
        c.sensing_ranges_m = {15, 30};
        c.trials_per_config = 3;
        c.master_seed = 7;
        const auto a = dataset::run_sweep(c, Execution::parallel);
        const auto b = dataset::run_sweep(c, Execution::serial);
        check("sweep determinism", a.samples == b.samples);
        for (const auto& row : a.samples)
            check("sweep BP_max bound", row.barriers <= std::floor(row.n_sensors / 3.0));
    }

    // Coverage: bound, monotonicity, witness validity.
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto g = kbtest::random_small_graph(900 + seed, 11, seed % 2 ? Distribution::uniform : Distribution::gaussian);
        const auto c = coverage::count_barriers(g);
        check("BP_max bound", c.k <= coverage::max_barrier_paths(g.vertex_count, 3));
        for (std::size_t e = 0; e < g.edges.size(); e += 4)
            check("edge-removal monotonicity", coverage::count_barriers(coverage::without_edge(g, e)).k <= c.k);
        auto more = g.positions;
        more.push_back({5.0 + static_cast<double>(seed % 7), -3.0});
        check("sensor-addition monotonicity", coverage::count_barriers(coverage::build_graph(more, g.link_threshold)).k >= c.k);
        for (const auto& cycle : c.witness) {
            double residual = 1.0;
            check("witness winding", std::abs(coverage::winding_number(g, cycle, &residual)) == 1 && residual < 1e-9);
        }
    }

    // Histogram mass conservation and metric scaling.
    {
        rng::Engine eng(3);
        std::vector<double> o, p, o2, p2;
        for (int i = 0; i < 1000; ++i) {
            o.push_back(10 * rng::uniform01(eng));
            p.push_back(o.back() + rng::uniform01(eng) - 0.3);
            o2.push_back(2.5 * o.back());
            p2.push_back(2.5 * p.back());
        }
        check("histogram mass", analysis::error_histogram(o, p).total() == o.size());
        const auto m1 = analysis::metrics(o, p), m2 = analysis::metrics(o2, p2);
        check("metric scaling", std::abs(m1.r - m2.r) < 1e-12 && std::abs(m2.rmse - 2.5 * m1.rmse) < 1e-12 * m2.rmse &&
                                    std::abs(m2.bias - 2.5 * m1.bias) < 1e-12 * std::max(1.0, std::abs(m2.bias)));
        check("rmse >= |bias|", m1.rmse >= std::abs(m1.bias));
    }

    // Additive-model PDP identity.
    {
        dataset::Dataset d;
        rng::Engine eng(4);
        for (int i = 0; i < 50; ++i) {
            const double rs = 15 + 25 * rng::uniform01(eng);
            d.samples.push_back(kbtest::sample(5000 + 40000 * rng::uniform01(eng), rs, 2 * rs, 100 + i * 6, 1));
        }
        const analysis::Predictor f = [](const dataset::Features& x) {
            return std::log(x[0]) + 0.3 * x[1] + std::sqrt(x[2]) * 0.1 - 0.002 * x[3];
        };
        double mean_rest = 0;
        for (const auto& s : d.samples) mean_rest += std::sqrt(s.tx_range_m) * 0.1 - 0.002 * s.n_sensors;
        mean_rest /= static_cast<double>(d.size());
        const auto surf = analysis::pdp_surface(f, d, {0, 1});
        bool ok = true;
        for (std::size_t i = 0; i < surf.grid_x.size(); ++i)
            for (std::size_t j = 0; j < surf.grid_y.size(); ++j)
                ok = ok && std::abs(surf.values[i][j] - (std::log(surf.grid_x[i]) + 0.3 * surf.grid_y[j] + mean_rest)) < 1e-9;
        check("additive PDP identity", ok);
    }

    // Boosting: SSE monotone, non-negative risk drops, additive prediction.
    {
        rng::Engine eng(5);
        std::vector<dataset::Features> x;
        std::vector<double> y;
        for (int i = 0; i < 80; ++i) {
            x.push_back({rng::uniform01(eng), rng::uniform01(eng), rng::uniform01(eng), rng::uniform01(eng)});
            y.push_back(x.back()[0] * 4 + x.back()[3] + rng::uniform01(eng));
        }
        std::vector<double> sse;
        const auto e = ensemble::fit_lsboost(x, y, 100, 1.0, &sse);
        for (std::size_t i = 1; i < sse.size(); ++i) check("boosting SSE monotone", sse[i] <= sse[i - 1] * (1 + 1e-12));
        for (const auto& s : e.stumps) check("risk drop >= 0", s.risks.reduction() >= 0.0);
    }

    // MLP: normalisation round trip and training determinism.
    {
        Eigen::MatrixXd rows(3, 1);
        rows << 2.0, 9.0, 5.0;
        const auto map = mlp::MinMaxMap::fit(rows);
        for (double v = 2.0; v <= 9.0; v += 0.5) {
            const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, v);
            check("normalisation round trip", std::abs(map.invert(map.apply(y))(0) - v) < 1e-12);
        }
        dataset::Dataset d;
        for (int i = 0; i < 30; ++i) d.samples.push_back(kbtest::sample(5000 + 100 * i, 15 + i % 4, 40, 100 + i, i * 0.7));
        d = dataset::split(d, 2);
        mlp::TrainConfig c;
        c.restarts = 1;
        c.max_epochs = 40;
        const auto a = mlp::train_lm(d, c), b = mlp::train_lm(d, c);
        check("training determinism", a.report.train_loss == b.report.train_loss && a.model.parameters() == b.model.parameters());
    }

    std::sort(failed.begin(), failed.end());
    failed.erase(std::unique(failed.begin(), failed.end()), failed.end());
    std::string detail = failed.empty() ? "all property checks hold" : "failed:";
    for (const auto& f : failed) detail += " [" + f + "]";
    return verdict(failed.empty(), detail);
}

Result criterion9() {
    timing::BenchConfig cfg;  // N = 100, 200, 300 on 5000 m^2, Rs = 15, Rtx = 30
    const auto rows = timing::run_bench(cfg, mlp::MlpModel::random({4, 20, 20, 1}, 1));
    std::vector<double> mc;
    double surrogate = 0.0;
    for (const auto& r : rows) {
        if (r.task == "monte_carlo") mc.push_back(r.seconds_per_eval);
        else surrogate = r.seconds_per_eval;
    }
    bool increasing = true;
    for (std::size_t i = 1; i < mc.size(); ++i) increasing = increasing && mc[i] > mc[i - 1];
    const double cheapest = *std::min_element(mc.begin(), mc.end());
    const double speedup = cheapest / surrogate;
    std::string detail = "monte carlo s/eval";
    for (double t : mc) detail += " " + fmt(t, 3);
    detail += "; surrogate " + fmt(surrogate, 3) + " s (x" + fmt(speedup, 3) + " faster)";
    return verdict(increasing && speedup >= kSurrogateSpeedup, detail);
}

struct Criterion {
    int id;
    const char* title;
    bool needs_published;
    std::function<Result(const Published*)> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    int only = 0;
    app.add_option("--criterion", only, "Run a single criterion (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all = {
        {1, "oracle equivalence", false, [](const Published*) { return criterion1(); }},
        {2, "jacobian check", false, [](const Published*) { return criterion2(); }},
        {3, "published-data metrics", true, [](const Published* p) { return criterion3(*p); }},
        {4, "two vs one hidden layer", true, [](const Published* p) { return criterion4(*p); }},
        {5, "feature importance", true, [](const Published* p) { return criterion5(*p); }},
        {6, "pdp signs", true, [](const Published* p) { return criterion6(*p); }},
        {7, "sampler statistics", false, [](const Published*) { return criterion7(); }},
        {8, "property suites", false, [](const Published*) { return criterion8(); }},
        {9, "bench ordering", false, [](const Published*) { return criterion9(); }},
    };

    std::optional<Published> published;
    std::string blocked_reason;
    bool tried_published = false;
    int failures = 0, blocked = 0;
    for (const auto& c : all) {
        if (only != 0 && c.id != only) continue;
        Result r{Outcome::fail, ""};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (c.needs_published) {
                if (!tried_published) {
                    published = load_published(blocked_reason);
                    tried_published = true;
                }
                r = published ? c.run(&*published) : Result{Outcome::blocked, blocked_reason};
            } else {
                r = c.run(nullptr);
            }
        } catch (const std::exception& e) {
            r = {Outcome::fail, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const char* tag = r.outcome == Outcome::pass ? "PASS" : r.outcome == Outcome::fail ? "FAIL" : "BLOCKED";
        std::cout << "criterion " << c.id << " [" << c.title << "]: " << tag << " - " << r.detail << " ("
                  << fmt(secs, 3) << " s)" << std::endl;
        failures += r.outcome == Outcome::fail;
        blocked += r.outcome == Outcome::blocked;
    }
    if (failures > 0) return 1;
    if (blocked > 0) return 77;
    return 0;
}
