#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kbarrier/coverage.hpp"
#include "kbarrier/deployment.hpp"
#include "kbarrier/execution.hpp"

namespace kbarrier::dataset {

inline constexpr int kFeatureCount = 4;
using Features = std::array<double, kFeatureCount>;

/// Feature names in column order; also the CSV header minus the label.
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames{
    "area", "sensing_range", "transmission_range", "sensors"};

/// One feature row and its label (mean barrier count over trials).
struct Sample {
    double area_m2 = 0.0;
    double sensing_range_m = 0.0;
    double tx_range_m = 0.0;
    int n_sensors = 0;
    double barriers = 0.0;

    Features features() const {
        return {area_m2, sensing_range_m, tx_range_m, static_cast<double>(n_sensors)};
    }
    /// Throws ValidationError naming `row` (1-based data row) when an invariant fails.
    void validate(std::size_t row) const;

    friend bool operator==(const Sample&, const Sample&) = default;
};

enum class Split : std::uint8_t { train, val, test };
enum class Provenance { simulated, ingested };

std::string to_string(Split s);
std::string to_string(Provenance p);

struct Dataset {
    std::vector<Sample> samples;
    /// Empty until a split has been applied; otherwise one tag per sample.
    std::vector<Split> split;
    deployment::Distribution distribution = deployment::Distribution::gaussian;
    Provenance provenance = Provenance::simulated;

    std::size_t size() const { return samples.size(); }
    bool has_split() const { return !split.empty(); }
    /// Row indices tagged `s`, ascending.
    std::vector<std::size_t> rows(Split s) const;
    /// Copy holding only the rows tagged `s` (tags preserved).
    Dataset subset(Split s) const;
};

/// Grid of deployment parameters. Empty `tx_ranges_m` means Rtx = 2 Rs.
struct SweepConfig {
    std::vector<double> radii_m{40, 60, 80, 100, 127};
    std::vector<int> sensor_counts{100, 200, 300, 400};
    std::vector<double> sensing_ranges_m{15, 20, 25, 30, 35, 40};
    std::vector<double> tx_ranges_m{};
    int trials_per_config = 50;
    deployment::Distribution distribution = deployment::Distribution::gaussian;
    double sigma_m = 0.0;  // Gaussian; <= 0 means radius / 3
    std::uint64_t master_seed = 1;
    /// Permit values outside the published parameter ranges.
    bool allow_out_of_range = false;
    /// Per-count search budget; counts that exhaust it contribute their best
    /// packing found (a lower bound).
    coverage::SearchLimits limits{100'000, 1'000'000, 500};

    std::size_t config_count() const;
    void validate() const;
};

/// One grid point of a sweep, in emission order.
struct GridPoint {
    double radius_m;
    double sensing_range_m;
    double tx_range_m;
    int n_sensors;
};

std::vector<GridPoint> expand_grid(const SweepConfig& config);

struct SweepStats {
    std::size_t counts = 0;
    /// Counts that hit the search budget and report a lower bound.
    std::size_t inexact_counts = 0;
};

/// Mean barrier count per grid point. Trial t of grid point g is seeded with
/// derive_seed(master_seed, g, t), so the result does not depend on execution
/// order or thread count.
Dataset run_sweep(const SweepConfig& config, Execution exec = Execution::parallel,
                  SweepStats* stats = nullptr);

/// Header `area,sensing_range,transmission_range,sensors,barriers`, values
/// with 17 significant digits so that parsing reproduces them exactly.
void write_csv(std::ostream& out, const Dataset& data);

/// Parses a header line plus five numeric columns per row. Common alternative
/// header names are mapped onto the canonical columns (see README); an
/// unrecognised header is read positionally. `source` names the input in
/// diagnostics.
Dataset parse_csv(std::istream& in, deployment::Distribution distribution,
                  const std::string& source = "<input>");

/// Throws NotFoundError when the file is missing, ParseError / ValidationError
/// with 1-based line numbers otherwise.
Dataset ingest_csv(const std::string& path, deployment::Distribution distribution);

struct SplitCounts {
    std::size_t train;
    std::size_t val;
    std::size_t test;
};

/// 15% and 30% rounded to nearest for validation and test; the rest trains.
SplitCounts split_counts(std::size_t rows);

/// Shuffles row indices with std::mt19937 seeded by `seed` (Fisher-Yates with
/// unbiased bounded draws) and tags train, then val, then test. Requires at
/// least 10 rows.
Dataset split(Dataset data, std::uint32_t seed);

/// `{"rows": n, "seed": s, "split": {"0": "train", ...}}`.
void write_split_manifest(std::ostream& out, const Dataset& data, std::uint32_t seed);

}  // namespace kbarrier::dataset
