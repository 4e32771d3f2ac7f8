#include "kbarrier/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "kbarrier/error.hpp"
#include "kbarrier/rng.hpp"

namespace kbarrier::dataset {

namespace {

constexpr double kRadiusMin = 40, kRadiusMax = 127;
constexpr int kSensorsMin = 100, kSensorsMax = 400;
constexpr double kSensingMin = 15, kSensingMax = 40;
constexpr double kTxMin = 30, kTxMax = 80;
constexpr std::size_t kMinSplitRows = 10;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    std::string out(s.substr(first, last - first + 1));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') quoted = !quoted;
        if (c == ',' && !quoted) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::string normalize_header(std::string s) {
    std::string out;
    for (char c : s) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) out.push_back(static_cast<char>(std::tolower(uc)));
    }
    return out;
}

// Canonical column index for a header name, or -1.
int column_for(const std::string& header) {
    static const std::map<std::string, int> aliases = {
        {"area", 0},           {"aream2", 0},          {"areaofregion", 0},
        {"regionarea", 0},     {"sensingrange", 1},    {"rs", 1},
        {"sensingrangem", 1},  {"transmissionrange", 2}, {"rtx", 2},
        {"txrange", 2},        {"transmissionrangem", 2}, {"sensors", 3},
        {"n", 3},              {"nsensors", 3},        {"numberofsensors", 3},
        {"numsensors", 3},     {"barriers", 4},        {"k", 4},
        {"numberofbarriers", 4}, {"numberofkbarriers", 4}, {"kbarriers", 4},
    };
    const auto it = aliases.find(normalize_header(header));
    return it == aliases.end() ? -1 : it->second;
}

double parse_number(const std::string& field, const std::string& source, std::size_t line,
                    std::size_t column) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    if (!field.empty() && *begin == '+') ++begin;
    const auto res = std::from_chars(begin, end, v);
    if (field.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
        throw ParseError(source + ":" + std::to_string(line) + ": column " + std::to_string(column + 1) +
                         ": malformed number '" + field + "'");
    }
    return v;
}

bool in_range(double v, double lo, double hi) { return v >= lo && v <= hi; }

}  // namespace

void Sample::validate(std::size_t row) const {
    const std::string where = "row " + std::to_string(row) + ": ";
    if (!(area_m2 > 0.0)) throw ValidationError(where + "area must be positive");
    if (!(sensing_range_m > 0.0)) throw ValidationError(where + "sensing range must be positive");
    if (!(tx_range_m > 0.0)) throw ValidationError(where + "transmission range must be positive");
    if (n_sensors < 1) throw ValidationError(where + "sensor count must be >= 1");
    if (!(barriers >= 0.0)) throw ValidationError(where + "barrier count must be non-negative");
    if (tx_range_m < 2.0 * sensing_range_m) {
        throw ValidationError(where + "transmission range " + format_double(tx_range_m) +
                              " is below twice the sensing range " + format_double(sensing_range_m));
    }
}

std::string to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

std::string to_string(Provenance p) { return p == Provenance::simulated ? "simulated" : "ingested"; }

std::vector<std::size_t> Dataset::rows(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < split.size(); ++i)
        if (split[i] == s) out.push_back(i);
    return out;
}

Dataset Dataset::subset(Split s) const {
    Dataset out;
    out.distribution = distribution;
    out.provenance = provenance;
    for (std::size_t i : rows(s)) {
        out.samples.push_back(samples[i]);
        out.split.push_back(s);
    }
    return out;
}

// ---- sweep --------------------------------------------------------------------

std::size_t SweepConfig::config_count() const {
    const std::size_t tx = tx_ranges_m.empty() ? 1 : tx_ranges_m.size();
    return radii_m.size() * sensing_ranges_m.size() * tx * sensor_counts.size();
}

void SweepConfig::validate() const {
    if (trials_per_config < 1)
        throw ValidationError("trials_per_config must be >= 1, got " + std::to_string(trials_per_config));
    if (radii_m.empty() || sensor_counts.empty() || sensing_ranges_m.empty())
        throw ValidationError("sweep grid has an empty axis");
    for (double r : radii_m)
        if (!(r > 0.0) || (!allow_out_of_range && !in_range(r, kRadiusMin, kRadiusMax)))
            throw ValidationError("radius " + format_double(r) + " outside [40, 127]");
    for (int n : sensor_counts)
        if (n < 1 || (!allow_out_of_range && (n < kSensorsMin || n > kSensorsMax)))
            throw ValidationError("sensor count " + std::to_string(n) + " outside [100, 400]");
    for (double rs : sensing_ranges_m)
        if (!(rs > 0.0) || (!allow_out_of_range && !in_range(rs, kSensingMin, kSensingMax)))
            throw ValidationError("sensing range " + format_double(rs) + " outside [15, 40]");
    for (double tx : tx_ranges_m)
        if (!(tx > 0.0) || (!allow_out_of_range && !in_range(tx, kTxMin, kTxMax)))
            throw ValidationError("transmission range " + format_double(tx) + " outside [30, 80]");
    if (sigma_m < 0.0 || !std::isfinite(sigma_m)) throw ValidationError("sigma must be non-negative");

    std::string offending;
    for (double rs : sensing_ranges_m)
        for (double tx : tx_ranges_m)
            if (tx < 2.0 * rs) offending += " (Rs=" + format_double(rs) + ", Rtx=" + format_double(tx) + ")";
    if (!offending.empty())
        throw ValidationError("transmission range below twice the sensing range for:" + offending);
}

std::vector<GridPoint> expand_grid(const SweepConfig& config) {
    std::vector<GridPoint> grid;
    grid.reserve(config.config_count());
    for (double r : config.radii_m)
        for (double rs : config.sensing_ranges_m) {
            const std::vector<double> txs =
                config.tx_ranges_m.empty() ? std::vector<double>{2.0 * rs} : config.tx_ranges_m;
            for (double tx : txs)
                for (int n : config.sensor_counts) grid.push_back({r, rs, tx, n});
        }
    return grid;
}

namespace {

struct TrialResult {
    int k = 0;
    bool exact = true;
};

TrialResult run_trial(const SweepConfig& config, const GridPoint& gp, std::size_t grid_index,
                      std::size_t trial) {
    deployment::DeploymentSpec spec;
    spec.region.radius_m = gp.radius_m;
    spec.n_sensors = gp.n_sensors;
    spec.distribution = config.distribution;
    spec.sigma_x = spec.sigma_y = config.sigma_m;
    spec.seed = rng::derive_seed(config.master_seed, grid_index, trial);
    const auto field = deployment::make_field(spec, gp.sensing_range_m, gp.tx_range_m);
    // The sweep already parallelises over trials.
    const auto graph = coverage::build_coverage_graph(field, Execution::serial);
    const auto count = coverage::count_barriers(graph, config.limits);
    return {count.k, count.exact};
}

}  // namespace

Dataset run_sweep(const SweepConfig& config, Execution exec, SweepStats* stats) {
    config.validate();
    const auto grid = expand_grid(config);
    const auto trials = static_cast<std::size_t>(config.trials_per_config);
    const auto total = static_cast<std::int64_t>(grid.size() * trials);
    std::vector<TrialResult> results(static_cast<std::size_t>(total));

    if (exec == Execution::parallel) {
        // Exceptions cannot cross the OpenMP region; keep the first one.
        std::string failure;
        bool failed = false;
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t t = 0; t < total; ++t) {
            const auto i = static_cast<std::size_t>(t);
            try {
                results[i] = run_trial(config, grid[i / trials], i / trials, i % trials);
            } catch (const std::exception& e) {
#pragma omp critical(kbarrier_sweep_failure)
                if (!failed) {
                    failed = true;
                    failure = e.what();
                }
            }
        }
        if (failed) throw SamplingError("sweep trial failed: " + failure);
    } else {
        for (std::size_t i = 0; i < results.size(); ++i)
            results[i] = run_trial(config, grid[i / trials], i / trials, i % trials);
    }

    Dataset out;
    out.distribution = config.distribution;
    out.provenance = Provenance::simulated;
    SweepStats local;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const TrialResult& r = results[g * trials + t];
            sum += r.k;
            ++local.counts;
            if (!r.exact) ++local.inexact_counts;
        }
        Sample s;
        s.area_m2 = kPi * grid[g].radius_m * grid[g].radius_m;
        s.sensing_range_m = grid[g].sensing_range_m;
        s.tx_range_m = grid[g].tx_range_m;
        s.n_sensors = grid[g].n_sensors;
        s.barriers = sum / static_cast<double>(trials);
        out.samples.push_back(s);
    }
    if (stats) *stats = local;
    return out;
}

// ---- CSV ----------------------------------------------------------------------

void write_csv(std::ostream& out, const Dataset& data) {
    out << "area,sensing_range,transmission_range,sensors,barriers\n";
    for (const Sample& s : data.samples) {
        out << format_double(s.area_m2) << ',' << format_double(s.sensing_range_m) << ','
            << format_double(s.tx_range_m) << ',' << s.n_sensors << ',' << format_double(s.barriers) << '\n';
    }
}

Dataset parse_csv(std::istream& in, deployment::Distribution distribution, const std::string& source) {
    Dataset out;
    out.distribution = distribution;
    out.provenance = Provenance::ingested;

    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::array<int, 5> order{0, 1, 2, 3, 4};  // file column -> canonical column
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) {
            if (!have_header) break;
            continue;
        }
        const auto fields = split_fields(line);
        if (!have_header) {
            have_header = true;
            if (fields.size() != 5)
                throw ParseError(source + ":1: expected a header with 5 columns, found " +
                                 std::to_string(fields.size()));
            std::array<int, 5> mapped{};
            std::array<bool, 5> seen{};
            bool recognised = true;
            for (std::size_t c = 0; c < 5; ++c) {
                const int col = column_for(fields[c]);
                if (col < 0 || seen[static_cast<std::size_t>(col)]) {
                    recognised = false;
                    break;
                }
                seen[static_cast<std::size_t>(col)] = true;
                mapped[c] = col;
            }
            if (recognised) order = mapped;
            continue;
        }
        if (fields.size() != 5)
            throw ParseError(source + ":" + std::to_string(line_no) + ": expected 5 columns, found " +
                             std::to_string(fields.size()));
        std::array<double, 5> v{};
        for (std::size_t c = 0; c < 5; ++c)
            v[static_cast<std::size_t>(order[c])] = parse_number(fields[c], source, line_no, c);
        Sample s;
        s.area_m2 = v[0];
        s.sensing_range_m = v[1];
        s.tx_range_m = v[2];
        if (v[3] != std::floor(v[3]) || v[3] < 0 || v[3] > 1e9)
            throw ParseError(source + ":" + std::to_string(line_no) + ": sensor count must be an integer");
        s.n_sensors = static_cast<int>(v[3]);
        s.barriers = v[4];
        try {
            s.validate(out.samples.size() + 1);
        } catch (const ValidationError& e) {
            throw ValidationError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
        out.samples.push_back(s);
    }
    if (!have_header) throw ParseError(source + ":1: empty file (expected a header line)");
    return out;
}

Dataset ingest_csv(const std::string& path, deployment::Distribution distribution) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("dataset file not found: " + path);
    return parse_csv(in, distribution, path);
}

// ---- split --------------------------------------------------------------------

SplitCounts split_counts(std::size_t rows) {
    const auto val = static_cast<std::size_t>(std::llround(0.15 * static_cast<double>(rows)));
    const auto test = static_cast<std::size_t>(std::llround(0.30 * static_cast<double>(rows)));
    return {rows - val - test, val, test};
}

Dataset split(Dataset data, std::uint32_t seed) {
    const std::size_t n = data.size();
    if (n < kMinSplitRows)
        throw ValidationError("split needs at least 10 rows, got " + std::to_string(n));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937 gen(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng::bounded(gen, i + 1));
        std::swap(perm[i], perm[j]);
    }
    const SplitCounts c = split_counts(n);
    data.split.assign(n, Split::train);
    for (std::size_t p = 0; p < n; ++p) {
        Split tag = Split::train;
        if (p >= c.train + c.val) tag = Split::test;
        else if (p >= c.train) tag = Split::val;
        data.split[perm[p]] = tag;
    }
    return data;
}

void write_split_manifest(std::ostream& out, const Dataset& data, std::uint32_t seed) {
    nlohmann::ordered_json j;
    j["rows"] = data.size();
    j["seed"] = seed;
    const SplitCounts c = split_counts(data.size());
    j["counts"] = {{"train", c.train}, {"val", c.val}, {"test", c.test}};
    nlohmann::ordered_json tags = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < data.split.size(); ++i) tags[std::to_string(i)] = to_string(data.split[i]);
    j["split"] = std::move(tags);
    out << j.dump(2) << '\n';
}

}  // namespace kbarrier::dataset
