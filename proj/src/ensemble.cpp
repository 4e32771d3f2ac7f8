#include "kbarrier/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "kbarrier/error.hpp"

namespace kbarrier::ensemble {

namespace {

constexpr double kTieTolerance = 1e-12;

struct Candidate {
    bool valid = false;
    double gain = 0.0;  // SSE(parent) - SSE(left) - SSE(right)
    double threshold = 0.0;
};

bool better(const Candidate& c, const Candidate& best) {
    if (!c.valid) return false;
    if (!best.valid) return true;
    return c.gain > best.gain + kTieTolerance * std::max(1.0, std::fabs(best.gain));
}

// Best midpoint split on one feature; thresholds are scanned in ascending order
// so the first of several near-equal gains wins.
Candidate best_split_for_feature(const std::vector<Features>& x, const std::vector<double>& t, int feature) {
    const std::size_t n = x.size();
    const auto f = static_cast<std::size_t>(feature);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });

    double total = 0.0;
    for (double v : t) total += v;
    const double parent_term = total * total / static_cast<double>(n);

    Candidate best;
    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        left_sum += t[order[i]];
        const double a = x[order[i]][f];
        const double b = x[order[i + 1]][f];
        if (!(a < b)) continue;
        double thr = 0.5 * (a + b);
        if (!(a < thr && thr <= b)) thr = b;  // adjacent doubles
        const auto nl = static_cast<double>(i + 1);
        const auto nr = static_cast<double>(n - i - 1);
        const double right_sum = total - left_sum;
        Candidate c{true, left_sum * left_sum / nl + right_sum * right_sum / nr - parent_term, thr};
        if (better(c, best)) best = c;
    }
    return best;
}

double mean_of(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (std::size_t i : idx) s += v[i];
    return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
}

double sse_about(const std::vector<double>& v, const std::vector<std::size_t>& idx, double mean) {
    double s = 0.0;
    for (std::size_t i : idx) s += (v[i] - mean) * (v[i] - mean);
    return s;
}

}  // namespace

double StumpEnsemble::predict(const Features& x) const {
    double sum = 0.0;
    for (const Stump& s : stumps) sum += s.predict(x);
    return base_value + learning_rate * sum;
}

double node_risk(double probability, double mse) {
    if (!(probability >= 0.0 && probability <= 1.0)) throw ValidationError("node probability must lie in [0, 1]");
    if (!(mse >= 0.0)) throw ValidationError("node MSE must be non-negative");
    return probability * mse;
}

Stump fit_stump(const std::vector<Features>& x, const std::vector<double>& target, Execution exec) {
    if (x.empty() || x.size() != target.size()) throw ValidationError("stump needs equal, non-empty inputs");
    const std::size_t n = x.size();

    std::array<Candidate, kFeatureCount> per_feature{};
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (int f = 0; f < kFeatureCount; ++f)
            per_feature[static_cast<std::size_t>(f)] = best_split_for_feature(x, target, f);
    } else {
        for (int f = 0; f < kFeatureCount; ++f)
            per_feature[static_cast<std::size_t>(f)] = best_split_for_feature(x, target, f);
    }
    Candidate best;
    int best_feature = 0;
    for (int f = 0; f < kFeatureCount; ++f) {
        if (better(per_feature[static_cast<std::size_t>(f)], best)) {
            best = per_feature[static_cast<std::size_t>(f)];
            best_feature = f;
        }
    }

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const double mean = mean_of(target, all);
    const double rows = static_cast<double>(n);

    Stump s;
    s.risks.parent = node_risk(1.0, sse_about(target, all, mean) / rows);
    if (!best.valid || !(best.gain > 0.0)) {
        s.left_value = s.right_value = mean;
        s.threshold = std::numeric_limits<double>::infinity();
        s.risks.left = s.risks.parent;
        return s;
    }
    std::vector<std::size_t> left, right;
    for (std::size_t i = 0; i < n; ++i)
        (x[i][static_cast<std::size_t>(best_feature)] < best.threshold ? left : right).push_back(i);
    s.has_split = true;
    s.feature_index = best_feature;
    s.threshold = best.threshold;
    s.left_value = mean_of(target, left);
    s.right_value = mean_of(target, right);
    const double pl = static_cast<double>(left.size()) / rows;
    const double pr = static_cast<double>(right.size()) / rows;
    s.risks.left = node_risk(pl, sse_about(target, left, s.left_value) / static_cast<double>(left.size()));
    s.risks.right = node_risk(pr, sse_about(target, right, s.right_value) / static_cast<double>(right.size()));
    return s;
}

StumpEnsemble fit_lsboost(const std::vector<Features>& x, const std::vector<double>& y, int rounds,
                          double learning_rate, std::vector<double>* train_sse, Execution exec) {
    if (rounds < 1) throw ValidationError("boosting needs at least one round");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw ValidationError("learning rate must be a non-negative number");
    if (x.empty() || x.size() != y.size()) throw ValidationError("boosting needs equal, non-empty inputs");

    StumpEnsemble e;
    e.learning_rate = learning_rate;
    e.base_value = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    std::vector<double> residual(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - e.base_value;
    if (train_sse) train_sse->clear();

    std::array<double, kFeatureCount> reduction{};
    int branches = 0;
    for (int r = 0; r < rounds; ++r) {
        Stump s = fit_stump(x, residual, exec);
        if (s.has_split) {
            reduction[static_cast<std::size_t>(s.feature_index)] += s.risks.reduction();
            ++branches;
        }
        double sse = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            residual[i] -= learning_rate * s.predict(x[i]);
            sse += residual[i] * residual[i];
        }
        if (train_sse) train_sse->push_back(sse);
        e.stumps.push_back(s);
    }
    for (std::size_t f = 0; f < reduction.size(); ++f)
        e.importance[f] = branches > 0 ? reduction[f] / branches : 0.0;
    return e;
}

StumpEnsemble fit_lsboost(const dataset::Dataset& data, int rounds, double learning_rate,
                          std::vector<double>* train_sse) {
    std::vector<Features> x;
    std::vector<double> y;
    for (const auto& s : data.samples) {
        x.push_back(s.features());
        y.push_back(s.barriers);
    }
    return fit_lsboost(x, y, rounds, learning_rate, train_sse);
}

std::array<double, kFeatureCount> feature_importance(const StumpEnsemble& ensemble) {
    std::array<double, kFeatureCount> out = ensemble.importance;
    const double top = *std::max_element(out.begin(), out.end());
    if (top > 0.0)
        for (double& v : out) v /= top;
    return out;
}

void write_importance_csv(std::ostream& out, const std::array<double, kFeatureCount>& scores) {
    out << "feature,score\n";
    const auto old = out.precision(17);
    for (std::size_t f = 0; f < scores.size(); ++f) out << dataset::kFeatureNames[f] << ',' << scores[f] << '\n';
    out.precision(old);
}

}  // namespace kbarrier::ensemble
