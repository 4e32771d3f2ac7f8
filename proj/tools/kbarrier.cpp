// kbarrier: simulate k-barrier datasets, train and explain the surrogate.
//
//   kbarrier simulate --distribution gaussian --trials 50
//   kbarrier train    --dataset out/gaussian.csv
//   kbarrier explain  --dataset out/gaussian.csv --model out/gaussian_model.json
//   kbarrier bench
//   kbarrier predict  --model out/gaussian_model.json 5026.5 15 30 100
//
// Every option can also come from a key=value config file (--config); flags
// given on the command line win. Subcommand options live in a [section] named
// after the subcommand. KBARRIER_OUTPUT_DIR overrides the output directory
// unless --output-dir is passed explicitly.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kbarrier/analysis.hpp"
#include "kbarrier/dataset.hpp"
#include "kbarrier/ensemble.hpp"
#include "kbarrier/error.hpp"
#include "kbarrier/mlp.hpp"
#include "kbarrier/timing.hpp"

namespace fs = std::filesystem;
using namespace kbarrier;

namespace {

constexpr int kUsageExit = 2;

int exit_code_for(const std::string& kind) {
    static const std::vector<std::string> kinds = {
        "validation", "parse", "not_found", "io", "sampling", "degenerate_geometry",
        "structural", "training", "budget", "undefined_metric"};
    for (std::size_t i = 0; i < kinds.size(); ++i)
        if (kinds[i] == kind) return static_cast<int>(i) + 2;
    return 1;
}

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
    std::vector<T> out;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" []");
        if (first == std::string::npos) continue;
        const auto last = item.find_last_not_of(" []");
        std::istringstream is(item.substr(first, last - first + 1));
        T v{};
        if (!(is >> v) || !is.eof()) throw ValidationError(key + ": cannot parse '" + item + "'");
        out.push_back(v);
    }
    return out;
}

// Comma lists arrive as one string on the command line but as several values
// from an unquoted config entry; both end up as one comma-joined string.
CLI::Option* as_list(CLI::Option* opt) {
    return opt->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::Join)->capture_default_str();
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

struct Globals {
    std::string output_dir = "out";
    bool output_dir_from_flag = false;
};

fs::path resolve_output_dir(const Globals& g) {
    std::string dir = g.output_dir;
    if (!g.output_dir_from_flag)
        if (const char* env = std::getenv("KBARRIER_OUTPUT_DIR"); env && *env) dir = env;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
    const fs::path probe = fs::path(dir) / ".kbarrier_write_probe";
    {
        std::ofstream p(probe);
        if (!p) throw IoError("output directory '" + dir + "' is not writable");
    }
    fs::remove(probe, ec);
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

// Effective configuration of the global options and the running subcommand,
// in the format accepted by --config.
std::string config_snapshot(const CLI::App& app, const std::string& command) {
    std::istringstream all(app.config_to_str(true, false));
    std::string line, out;
    while (std::getline(all, line)) {
        const auto eq = line.find('=');
        const std::string key = line.substr(0, eq);
        if (key.find('.') == std::string::npos || key.rfind(command + ".", 0) == 0) out += line + '\n';
    }
    return out;
}

// Writes <command>_manifest.json: version, the complete effective
// configuration (usable again with --config), seeds and produced files.
void write_manifest(const fs::path& dir, const std::string& command, const CLI::App& app,
                    const nlohmann::ordered_json& seeds, const std::vector<fs::path>& outputs,
                    nlohmann::ordered_json extra = nlohmann::ordered_json::object()) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["version"] = KBARRIER_VERSION;
    j["config"] = config_snapshot(app, command);
    j["seeds"] = seeds;
    std::vector<std::string> names;
    for (const auto& p : outputs) names.push_back(p.filename().string());
    j["outputs"] = names;
    for (auto& [k, v] : extra.items()) j[k] = v;
    auto out = open_output(dir / (command + "_manifest.json"));
    out << j.dump(2) << '\n';
}

nlohmann::ordered_json metrics_json(const analysis::MetricsReport& m) {
    return {{"n", m.n}, {"r", m.r}, {"rmse", m.rmse}, {"bias", m.bias}};
}

deployment::Distribution distribution_arg(const std::string& s) { return deployment::distribution_from_string(s); }

// ---- simulate -----------------------------------------------------------------

struct SimulateOptions {
    std::string distribution = "gaussian";
    std::string radii = "40,60,80,100,127";
    std::string sensors = "100,200,300,400";
    std::string sensing_ranges = "15,20,25,30,35,40";
    std::string tx_ranges;  // empty: 2 x Rs
    int trials = 50;
    std::uint64_t seed = 1;
    double sigma = 0.0;
    std::uint32_t split_seed = 1;
    std::uint64_t max_work = 1'000'000;
    std::uint64_t work_per_edge = 500;
    bool allow_out_of_range = false;
    bool serial = false;
};

void cmd_simulate(const SimulateOptions& o, const Globals& g, const CLI::App& app) {
    dataset::SweepConfig cfg;
    cfg.radii_m = parse_list<double>(o.radii, "radii");
    cfg.sensor_counts = parse_list<int>(o.sensors, "sensors");
    cfg.sensing_ranges_m = parse_list<double>(o.sensing_ranges, "sensing_ranges");
    cfg.tx_ranges_m = parse_list<double>(o.tx_ranges, "tx_ranges");
    cfg.trials_per_config = o.trials;
    cfg.master_seed = o.seed;
    cfg.sigma_m = o.sigma;
    cfg.allow_out_of_range = o.allow_out_of_range;
    cfg.limits.max_work = o.max_work;
    cfg.limits.work_per_edge = o.work_per_edge;

    std::vector<deployment::Distribution> dists;
    if (o.distribution == "both") dists = {deployment::Distribution::gaussian, deployment::Distribution::uniform};
    else dists = {distribution_arg(o.distribution)};
    cfg.distribution = dists.front();
    cfg.validate();  // before any work

    const fs::path dir = resolve_output_dir(g);
    std::vector<fs::path> outputs;
    nlohmann::ordered_json stats_json = nlohmann::ordered_json::object();
    for (auto d : dists) {
        cfg.distribution = d;
        dataset::SweepStats stats;
        const auto data = dataset::split(
            dataset::run_sweep(cfg, o.serial ? Execution::serial : Execution::parallel, &stats), o.split_seed);
        const std::string name = deployment::to_string(d);
        const fs::path csv = dir / (name + ".csv");
        const fs::path manifest = dir / (name + "_split.json");
        {
            auto out = open_output(csv);
            dataset::write_csv(out, data);
        }
        {
            auto out = open_output(manifest);
            dataset::write_split_manifest(out, data, o.split_seed);
        }
        outputs.push_back(csv);
        outputs.push_back(manifest);
        stats_json[name] = {{"rows", data.size()}, {"counts", stats.counts}, {"inexact_counts", stats.inexact_counts}};
        std::cout << csv.string() << ": " << data.size() << " rows, " << stats.inexact_counts << "/" << stats.counts
                  << " counts hit the search budget\n";
    }
    write_manifest(dir, "simulate", app, {{"master_seed", o.seed}, {"split_seed", o.split_seed}}, outputs,
                   {{"grid_points", cfg.config_count()}, {"sweep", stats_json}});
}

// ---- train --------------------------------------------------------------------

struct TrainOptions {
    std::string dataset;
    std::string distribution = "gaussian";
    std::string hidden_layers = "20,20";
    std::uint32_t split_seed = 1;
    std::uint64_t init_seed = 1;
    int restarts = 10;
    int max_epochs = 1000;
    int max_val_failures = 6;
    double mu_init = 1e-3;
    double mu_inc = 10.0;
    double mu_dec = 0.1;
    double mu_max = 1e10;
    double min_gradient = 1e-7;
    std::string prefix;
};

void cmd_train(const TrainOptions& o, const Globals& g, const CLI::App& app) {
    mlp::TrainConfig cfg;
    cfg.hidden_layers = parse_list<int>(o.hidden_layers, "hidden_layers");
    cfg.init_seed = o.init_seed;
    cfg.restarts = o.restarts;
    cfg.max_epochs = o.max_epochs;
    cfg.max_val_failures = o.max_val_failures;
    cfg.mu_init = o.mu_init;
    cfg.mu_inc = o.mu_inc;
    cfg.mu_dec = o.mu_dec;
    cfg.mu_max = o.mu_max;
    cfg.min_gradient = o.min_gradient;
    cfg.validate();

    const auto dist = distribution_arg(o.distribution);
    const auto data = dataset::split(dataset::ingest_csv(o.dataset, dist), o.split_seed);
    const fs::path dir = resolve_output_dir(g);
    const std::string prefix = o.prefix.empty() ? deployment::to_string(dist) : o.prefix;

    const auto result = mlp::train_lm(data, cfg);
    const auto predicted = mlp::predict(result.model, data);

    std::vector<double> observed;
    for (const auto& s : data.samples) observed.push_back(s.barriers);
    nlohmann::ordered_json metrics;
    for (auto split : {dataset::Split::train, dataset::Split::val, dataset::Split::test}) {
        std::vector<double> obs, pred;
        for (std::size_t i : data.rows(split)) {
            obs.push_back(observed[i]);
            pred.push_back(predicted[i]);
        }
        metrics[dataset::to_string(split)] = metrics_json(analysis::metrics(obs, pred));
    }
    metrics["overall"] = metrics_json(analysis::metrics(observed, predicted));

    const fs::path model_path = dir / (prefix + "_model.json");
    const fs::path report_path = dir / (prefix + "_train_report.json");
    const fs::path metrics_path = dir / (prefix + "_metrics.json");
    const fs::path hist_path = dir / (prefix + "_error_histogram.csv");
    const fs::path pred_path = dir / (prefix + "_predictions.csv");
    mlp::save_model(model_path.string(), result.model);
    {
        auto out = open_output(report_path);
        mlp::write_report_json(out, result.report);
    }
    {
        auto out = open_output(metrics_path);
        out << metrics.dump(2) << '\n';
    }
    {
        auto out = open_output(hist_path);
        analysis::write_histogram_csv(out, analysis::error_histogram(observed, predicted));
    }
    {
        auto out = open_output(pred_path);
        out.precision(17);
        out << "row,split,observed,predicted,error\n";
        for (std::size_t i = 0; i < data.size(); ++i)
            out << i << ',' << dataset::to_string(data.split[i]) << ',' << observed[i] << ',' << predicted[i] << ','
                << observed[i] - predicted[i] << '\n';
    }
    write_manifest(dir, "train", app, {{"split_seed", o.split_seed}, {"init_seed", o.init_seed}},
                   {model_path, report_path, metrics_path, hist_path, pred_path},
                   {{"stop_reason", mlp::to_string(result.report.stop_reason)}});

    const auto& all = metrics["overall"];
    std::cout << "trained 4:" << join(cfg.hidden_layers) << ":1 on " << data.size() << " rows ("
              << mlp::to_string(result.report.stop_reason) << " after " << result.report.epochs_run
              << " epochs, restart " << result.report.restart << "); overall R=" << all["r"].get<double>()
              << " RMSE=" << all["rmse"].get<double>() << " bias=" << all["bias"].get<double>() << '\n';
}

// ---- explain ------------------------------------------------------------------

struct ExplainOptions {
    std::string dataset;
    std::string model;
    std::string distribution = "gaussian";
    int grid_n = 20;
    int rounds = 100;
    double learning_rate = 1.0;
    std::string prefix;
};

void cmd_explain(const ExplainOptions& o, const Globals& g, const CLI::App& app) {
    const auto dist = distribution_arg(o.distribution);
    const auto data = dataset::ingest_csv(o.dataset, dist);
    const auto model = mlp::load_model(o.model);
    if (model.layer_sizes.front() != dataset::kFeatureCount)
        throw StructuralError("model " + o.model + " expects " + std::to_string(model.layer_sizes.front()) +
                              " features, dataset has " + std::to_string(dataset::kFeatureCount));
    const fs::path dir = resolve_output_dir(g);
    const std::string prefix = o.prefix.empty() ? deployment::to_string(dist) : o.prefix;

    std::vector<fs::path> outputs;
    const auto ens = ensemble::fit_lsboost(data, o.rounds, o.learning_rate);
    const fs::path imp_path = dir / (prefix + "_importance.csv");
    {
        auto out = open_output(imp_path);
        ensemble::write_importance_csv(out, ensemble::feature_importance(ens));
    }
    outputs.push_back(imp_path);

    const analysis::Predictor predictor = [&](const dataset::Features& x) { return model.predict(x); };
    nlohmann::ordered_json slopes = nlohmann::ordered_json::object();
    for (auto [a, b] : analysis::feature_pairs()) {
        const auto surface = analysis::pdp_surface(predictor, data, {a, b}, o.grid_n);
        const std::string fa = dataset::kFeatureNames[static_cast<std::size_t>(a)];
        const std::string fb = dataset::kFeatureNames[static_cast<std::size_t>(b)];
        if (surface.degenerate_x || surface.degenerate_y)
            std::cerr << "warning: degenerate: feature '" << (surface.degenerate_x ? fa : fb)
                      << "' is constant; its PDP axis has a single point\n";
        const fs::path p = dir / (prefix + "_pdp_" + fa + "_" + fb + ".csv");
        auto out = open_output(p);
        analysis::write_pdp_csv(out, surface);
        outputs.push_back(p);
        slopes[fa + "," + fb] = {{"slope_x", surface.mean_slope_x()}, {"slope_y", surface.mean_slope_y()}};
    }
    write_manifest(dir, "explain", app, nlohmann::ordered_json::object(), outputs, {{"pdp_mean_slopes", slopes}});
    std::cout << "wrote " << outputs.size() << " files to " << dir.string() << '\n';
}

// ---- bench --------------------------------------------------------------------

struct BenchOptions {
    std::string sensors = "100,200,300";
    std::string distribution = "gaussian";
    std::string model;
    int trials = 10;
    int forward_reps = 20000;
    std::uint64_t seed = 1;
    std::uint64_t max_work = 1'000'000;
    std::uint64_t work_per_edge = 500;
};

void cmd_bench(const BenchOptions& o, const Globals& g, const CLI::App& app) {
    timing::BenchConfig cfg;
    cfg.sensor_counts = parse_list<int>(o.sensors, "sensors");
    cfg.distribution = distribution_arg(o.distribution);
    cfg.trials = o.trials;
    cfg.forward_reps = o.forward_reps;
    cfg.seed = o.seed;
    cfg.limits.max_work = o.max_work;
    cfg.limits.work_per_edge = o.work_per_edge;
    cfg.validate();
    // Without a trained model the timing uses a randomly initialised 4:20:20:1 net;
    // the cost of a forward pass does not depend on the weights.
    const auto model = o.model.empty() ? mlp::MlpModel::random({4, 20, 20, 1}, o.seed) : mlp::load_model(o.model);
    const fs::path dir = resolve_output_dir(g);
    const auto rows = timing::run_bench(cfg, model);
    const fs::path path = dir / "bench.csv";
    {
        auto out = open_output(path);
        timing::write_bench_csv(out, rows);
    }
    write_manifest(dir, "bench", app, {{"seed", o.seed}}, {path});
    timing::write_bench_csv(std::cout, rows);
}

// ---- predict ------------------------------------------------------------------

struct PredictOptions {
    std::string model;
    std::vector<double> features;
};

void cmd_predict(const PredictOptions& o) {
    if (o.features.size() != static_cast<std::size_t>(dataset::kFeatureCount))
        throw ValidationError("predict needs 4 features: area sensing_range transmission_range sensors");
    const auto model = mlp::load_model(o.model);
    const dataset::Features x{o.features[0], o.features[1], o.features[2], o.features[3]};
    std::cout.precision(10);
    std::cout << model.predict(x) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-barrier simulator and surrogate model toolkit"};
    app.set_version_flag("--version", std::string(KBARRIER_VERSION));
    app.set_config("--config", "", "key=value configuration file ([subcommand] sections)");
    app.require_subcommand(1);

    Globals globals;
    app.add_option("-o,--output-dir", globals.output_dir, "Directory for all outputs")->capture_default_str();

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo sweep -> dataset CSV + split + manifest");
    simulate->add_option("--distribution", sim.distribution, "gaussian | uniform | both")->capture_default_str();
    as_list(simulate->add_option("--radii", sim.radii, "Region radii in metres (comma list)"));
    as_list(simulate->add_option("--sensors", sim.sensors, "Sensor counts (comma list)"));
    as_list(simulate->add_option("--sensing-ranges", sim.sensing_ranges, "Sensing ranges in metres"));
    as_list(simulate->add_option("--tx-ranges", sim.tx_ranges, "Transmission ranges (empty: 2 x Rs)"));
    simulate->add_option("--trials", sim.trials, "Trials per grid point")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    simulate->add_option("--sigma", sim.sigma, "Gaussian sigma in metres (0: radius / 3)")->capture_default_str();
    simulate->add_option("--split-seed", sim.split_seed, "Seed of the 55:15:30 split")->capture_default_str();
    simulate->add_option("--max-work", sim.max_work, "Base search budget per barrier count")->capture_default_str();
    simulate->add_option("--work-per-edge", sim.work_per_edge, "Extra search budget per graph edge")->capture_default_str();
    simulate->add_flag("--allow-out-of-range", sim.allow_out_of_range, "Permit parameters outside the usual ranges");
    simulate->add_flag("--serial", sim.serial, "Run the sweep on one thread");

    TrainOptions tr;
    auto* train = app.add_subcommand("train", "Levenberg-Marquardt training + metrics");
    train->add_option("--dataset", tr.dataset, "Dataset CSV")->required();
    train->add_option("--distribution", tr.distribution, "Label for the dataset")->capture_default_str();
    as_list(train->add_option("--hidden-layers", tr.hidden_layers, "Hidden layer sizes (comma list)"));
    train->add_option("--split-seed", tr.split_seed, "Seed of the 55:15:30 split")->capture_default_str();
    train->add_option("--init-seed", tr.init_seed, "Weight initialisation seed")->capture_default_str();
    train->add_option("--restarts", tr.restarts, "Independent restarts")->capture_default_str();
    train->add_option("--max-epochs", tr.max_epochs)->capture_default_str();
    train->add_option("--max-val-failures", tr.max_val_failures)->capture_default_str();
    train->add_option("--mu-init", tr.mu_init)->capture_default_str();
    train->add_option("--mu-inc", tr.mu_inc)->capture_default_str();
    train->add_option("--mu-dec", tr.mu_dec)->capture_default_str();
    train->add_option("--mu-max", tr.mu_max)->capture_default_str();
    train->add_option("--min-gradient", tr.min_gradient)->capture_default_str();
    train->add_option("--prefix", tr.prefix, "Output file prefix (default: distribution)");

    ExplainOptions ex;
    auto* explain = app.add_subcommand("explain", "Feature importance + six partial dependence surfaces");
    explain->add_option("--dataset", ex.dataset, "Dataset CSV")->required();
    explain->add_option("--model", ex.model, "Model JSON")->required();
    explain->add_option("--distribution", ex.distribution)->capture_default_str();
    explain->add_option("--grid-n", ex.grid_n, "PDP grid points per axis")->capture_default_str();
    explain->add_option("--rounds", ex.rounds, "Boosting rounds")->capture_default_str();
    explain->add_option("--learning-rate", ex.learning_rate)->capture_default_str();
    explain->add_option("--prefix", ex.prefix, "Output file prefix (default: distribution)");

    BenchOptions be;
    auto* bench = app.add_subcommand("bench", "Monte Carlo vs surrogate timing");
    as_list(bench->add_option("--sensors", be.sensors, "Sensor counts (comma list)"));
    bench->add_option("--distribution", be.distribution)->capture_default_str();
    bench->add_option("--model", be.model, "Model JSON (default: random 4:20:20:1)");
    bench->add_option("--trials", be.trials, "Monte Carlo trials per cell")->capture_default_str();
    bench->add_option("--forward-reps", be.forward_reps)->capture_default_str();
    bench->add_option("--seed", be.seed)->capture_default_str();
    bench->add_option("--max-work", be.max_work, "Base search budget per barrier count")->capture_default_str();
    bench->add_option("--work-per-edge", be.work_per_edge, "Extra search budget per graph edge")->capture_default_str();

    PredictOptions pr;
    auto* predict = app.add_subcommand("predict", "Single prediction from a saved model");
    predict->add_option("--model", pr.model, "Model JSON")->required();
    predict->add_option("features", pr.features, "area sensing_range transmission_range sensors")->expected(4)->configurable(false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << one_line(e.what()) << '\n';
        return kUsageExit;
    }
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "-o" || a == "--output-dir" || a.rfind("--output-dir=", 0) == 0) globals.output_dir_from_flag = true;
    }

    try {
        if (*simulate) cmd_simulate(sim, globals, app);
        else if (*train) cmd_train(tr, globals, app);
        else if (*explain) cmd_explain(ex, globals, app);
        else if (*bench) cmd_bench(be, globals, app);
        else if (*predict) cmd_predict(pr);
    } catch (const Error& e) {
        std::cerr << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << one_line(e.what()) << '\n';
        return 1;
    }
    return 0;
}
