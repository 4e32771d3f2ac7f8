#include "kbarrier/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "kbarrier/error.hpp"

namespace kbarrier::analysis {

MetricsReport metrics(std::span<const double> observed, std::span<const double> predicted) {
    if (observed.size() != predicted.size())
        throw ValidationError("metrics: " + std::to_string(observed.size()) + " observed vs " +
                              std::to_string(predicted.size()) + " predicted values");
    if (observed.size() < 2) throw ValidationError("metrics need at least two values");
    const auto n = static_cast<double>(observed.size());
    double mo = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        mo += observed[i];
        mp += predicted[i];
    }
    mo /= n;
    mp /= n;
    double soo = 0.0, spp = 0.0, sop = 0.0, sq = 0.0, bias = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double a = observed[i] - mo;
        const double b = predicted[i] - mp;
        soo += a * a;
        spp += b * b;
        sop += a * b;
        const double d = predicted[i] - observed[i];
        sq += d * d;
        bias += d;
    }
    if (!(soo > 0.0)) throw UndefinedMetricError("correlation undefined: observed values have zero variance");
    if (!(spp > 0.0)) throw UndefinedMetricError("correlation undefined: predicted values have zero variance");
    MetricsReport m;
    m.n = observed.size();
    m.r = std::clamp(sop / std::sqrt(soo * spp), -1.0, 1.0);
    m.rmse = std::sqrt(sq / n);
    m.bias = bias / n;
    return m;
}

std::size_t Histogram::total() const {
    std::size_t t = 0;
    for (std::size_t c : counts) t += c;
    return t;
}

std::size_t Histogram::modal_bin() const {
    return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

Histogram error_histogram(std::span<const double> observed, std::span<const double> predicted, int bins) {
    if (observed.size() != predicted.size()) throw ValidationError("histogram: length mismatch");
    if (observed.empty()) throw ValidationError("histogram needs at least one value");
    if (bins < 1) throw ValidationError("histogram needs at least one bin");
    std::vector<double> e(observed.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = observed[i] - predicted[i];
    const auto [lo_it, hi_it] = std::minmax_element(e.begin(), e.end());
    const double lo = *lo_it, hi = *hi_it;

    Histogram h;
    if (!(hi > lo)) {
        h.degenerate = true;
        h.edges = {lo, hi};
        h.counts = {e.size()};
        return h;
    }
    const double width = (hi - lo) / bins;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) h.edges[static_cast<std::size_t>(b)] = lo + width * b;
    h.edges.back() = hi;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double v : e) {
        auto b = static_cast<long>(std::floor((v - lo) / width));
        b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
        // Keep bin membership consistent with the stored edges.
        while (b > 0 && v < h.edges[static_cast<std::size_t>(b)]) --b;
        while (b + 1 < bins && v >= h.edges[static_cast<std::size_t>(b) + 1]) ++b;
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

namespace {

std::vector<double> axis(const dataset::Dataset& data, int feature, int grid_n, bool& degenerate) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double v = data.samples[i].features()[static_cast<std::size_t>(feature)];
        if (i == 0 || v < lo) lo = v;
        if (i == 0 || v > hi) hi = v;
    }
    degenerate = !(hi > lo);
    if (degenerate) return {lo};
    std::vector<double> g(static_cast<std::size_t>(grid_n));
    for (int i = 0; i < grid_n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (grid_n - 1);
    g.back() = hi;
    return g;
}

double mean_slope(const std::vector<double>& grid, std::size_t other,
                  const std::function<double(std::size_t, std::size_t)>& at) {
    if (grid.size() < 2 || other == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t j = 0; j < other; ++j)
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) sum += (at(i + 1, j) - at(i, j)) / (grid[i + 1] - grid[i]);
    return sum / static_cast<double>(other * (grid.size() - 1));
}

}  // namespace

double PdpSurface::mean_slope_x() const {
    return mean_slope(grid_x, grid_y.size(), [&](std::size_t i, std::size_t j) { return values[i][j]; });
}

double PdpSurface::mean_slope_y() const {
    return mean_slope(grid_y, grid_x.size(), [&](std::size_t j, std::size_t i) { return values[i][j]; });
}

PdpSurface pdp_surface(const Predictor& model, const dataset::Dataset& data, std::pair<int, int> features,
                       int grid_n, Execution exec) {
    const auto [fx, fy] = features;
    if (fx < 0 || fy < 0 || fx >= dataset::kFeatureCount || fy >= dataset::kFeatureCount || fx == fy)
        throw ValidationError("PDP needs two distinct feature indices in [0, 4)");
    if (data.size() == 0) throw ValidationError("PDP needs a non-empty dataset");
    if (grid_n < 2) throw ValidationError("PDP grid needs at least two points per axis");

    PdpSurface s;
    s.feature_x = fx;
    s.feature_y = fy;
    s.grid_x = axis(data, fx, grid_n, s.degenerate_x);
    s.grid_y = axis(data, fy, grid_n, s.degenerate_y);
    const std::size_t nx = s.grid_x.size(), ny = s.grid_y.size();
    s.values.assign(nx, std::vector<double>(ny, 0.0));

    std::vector<dataset::Features> rows;
    rows.reserve(data.size());
    for (const auto& sample : data.samples) rows.push_back(sample.features());

    auto cell = [&](std::size_t c) {
        const std::size_t i = c / ny, j = c % ny;
        double sum = 0.0;
        for (dataset::Features x : rows) {
            x[static_cast<std::size_t>(fx)] = s.grid_x[i];
            x[static_cast<std::size_t>(fy)] = s.grid_y[j];
            sum += model(x);
        }
        s.values[i][j] = sum / static_cast<double>(rows.size());
    };
    const auto cells = static_cast<std::int64_t>(nx * ny);
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t c = 0; c < cells; ++c) cell(static_cast<std::size_t>(c));
    } else {
        for (std::int64_t c = 0; c < cells; ++c) cell(static_cast<std::size_t>(c));
    }
    return s;
}

std::vector<std::pair<int, int>> feature_pairs() {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < dataset::kFeatureCount; ++a)
        for (int b = a + 1; b < dataset::kFeatureCount; ++b) out.emplace_back(a, b);
    return out;
}

void write_pdp_csv(std::ostream& out, const PdpSurface& surface) {
    const auto old = out.precision(17);
    out << "x,y,value\n";
    for (std::size_t i = 0; i < surface.grid_x.size(); ++i)
        for (std::size_t j = 0; j < surface.grid_y.size(); ++j)
            out << surface.grid_x[i] << ',' << surface.grid_y[j] << ',' << surface.values[i][j] << '\n';
    out.precision(old);
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
    const auto old = out.precision(17);
    out << "bin,lower,upper,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        out << b << ',' << h.edges[b] << ',' << h.edges[b + 1] << ',' << h.counts[b] << '\n';
    out.precision(old);
}

}  // namespace kbarrier::analysis
