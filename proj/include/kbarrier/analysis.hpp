#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "kbarrier/dataset.hpp"
#include "kbarrier/execution.hpp"

namespace kbarrier::analysis {

struct MetricsReport {
    double r = 0.0;     // Pearson correlation
    double rmse = 0.0;  // sqrt(mean((predicted - observed)^2))
    double bias = 0.0;  // mean(predicted - observed); positive = overestimation
    std::size_t n = 0;
};

/// Throws ValidationError on length mismatch or fewer than two values and
/// UndefinedMetricError when either vector has zero variance.
MetricsReport metrics(std::span<const double> observed, std::span<const double> predicted);

/// Errors e = observed - predicted in equal-width bins over [min e, max e];
/// negative errors are overestimates. All-equal errors give one degenerate bin.
struct Histogram {
    std::vector<double> edges;  // bins + 1 entries
    std::vector<std::size_t> counts;
    bool degenerate = false;

    std::size_t total() const;
    std::size_t modal_bin() const;  // first bin with the largest count
};

Histogram error_histogram(std::span<const double> observed, std::span<const double> predicted, int bins = 20);

using Predictor = std::function<double(const dataset::Features&)>;

/// values[i][j] is the mean prediction over the dataset with feature_x set to
/// grid_x[i] and feature_y set to grid_y[j]. A constant feature yields a
/// one-point axis and sets the matching degenerate flag.
struct PdpSurface {
    int feature_x = 0;
    int feature_y = 1;
    std::vector<double> grid_x;
    std::vector<double> grid_y;
    std::vector<std::vector<double>> values;
    bool degenerate_x = false;
    bool degenerate_y = false;

    /// Mean of adjacent-grid finite-difference slopes along each axis,
    /// averaged over the other axis. 0 on a one-point axis.
    double mean_slope_x() const;
    double mean_slope_y() const;
};

/// `grid_n` evenly spaced points over the observed range of each feature.
/// Grid cells are evaluated in parallel under Execution::parallel, so the
/// predictor must be safe to call concurrently.
PdpSurface pdp_surface(const Predictor& model, const dataset::Dataset& data, std::pair<int, int> features,
                       int grid_n = 20, Execution exec = Execution::parallel);

/// The six unordered pairs of the four features, in lexicographic order.
std::vector<std::pair<int, int>> feature_pairs();

/// Long format `x,y,value`.
void write_pdp_csv(std::ostream& out, const PdpSurface& surface);
/// `bin,lower,upper,count`.
void write_histogram_csv(std::ostream& out, const Histogram& h);

}  // namespace kbarrier::analysis
