#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "kbarrier/dataset.hpp"
#include "kbarrier/execution.hpp"

namespace kbarrier::ensemble {

using dataset::Features;
using dataset::kFeatureCount;

/// Risks of a stump's three nodes; each is node probability times node MSE.
struct NodeRisks {
    double parent = 0.0;
    double left = 0.0;
    double right = 0.0;

    double reduction() const { return parent - (left + right); }
};

/// Depth-one regression tree. Rows with feature < threshold go left. A stump
/// without a split (constant feature columns or residuals) has equal leaves.
struct Stump {
    bool has_split = false;
    int feature_index = 0;
    double threshold = 0.0;
    double left_value = 0.0;
    double right_value = 0.0;
    NodeRisks risks;

    double predict(const Features& x) const {
        return x[static_cast<std::size_t>(feature_index)] < threshold ? left_value : right_value;
    }
};

struct StumpEnsemble {
    double base_value = 0.0;
    double learning_rate = 1.0;
    std::vector<Stump> stumps;
    /// Accumulated node-risk reduction per feature, divided by the number of
    /// branch nodes in the ensemble (not rescaled).
    std::array<double, kFeatureCount> importance{};

    /// base_value + learning_rate * sum of stump outputs.
    double predict(const Features& x) const;
};

/// probability * mse.
double node_risk(double probability, double mse);

/// Least-squares stump for `target` over every (feature, midpoint threshold)
/// pair. Near-ties (relative 1e-12) go to the lower feature index, then the
/// lower threshold.
Stump fit_stump(const std::vector<Features>& x, const std::vector<double>& target,
                Execution exec = Execution::parallel);

/// Least-squares boosting: start from the label mean, then `rounds` times fit
/// a stump to the residuals and add it scaled by `learning_rate`.
/// `train_sse`, when given, receives the training SSE after every round.
StumpEnsemble fit_lsboost(const std::vector<Features>& x, const std::vector<double>& y, int rounds,
                          double learning_rate, std::vector<double>* train_sse = nullptr,
                          Execution exec = Execution::parallel);

/// Fits on every row of `data`.
StumpEnsemble fit_lsboost(const dataset::Dataset& data, int rounds, double learning_rate,
                          std::vector<double>* train_sse = nullptr);

/// Importance rescaled so the largest entry is 1; all zeros stay zeros.
std::array<double, kFeatureCount> feature_importance(const StumpEnsemble& ensemble);

/// `feature,score` rows in feature order.
void write_importance_csv(std::ostream& out, const std::array<double, kFeatureCount>& scores);

}  // namespace kbarrier::ensemble
