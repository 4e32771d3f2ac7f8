#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kbarrier/dataset.hpp"
#include "kbarrier/execution.hpp"

namespace kbarrier::mlp {

/// 2 / (1 + exp(-2n)) - 1, i.e. tanh(n), without overflow for large |n|.
double tansig(double n);

/// Per-dimension affine map of [lo, hi] onto [-1, 1]. A dimension with
/// lo == hi maps lo to 0 with unit half-range so the map stays invertible.
struct MinMaxMap {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    static MinMaxMap fit(const Eigen::MatrixXd& rows);  // one sample per row
    static MinMaxMap identity(Eigen::Index dims);

    Eigen::Index dims() const { return lo.size(); }
    Eigen::VectorXd half_range() const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::VectorXd invert(const Eigen::VectorXd& y) const;
};

/// Fully connected net: tansig hidden layers, linear output. Weights of layer
/// l are (size[l+1] x size[l]).
struct MlpModel {
    std::vector<int> layer_sizes{4, 20, 20, 1};
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    MinMaxMap input_map;
    MinMaxMap output_map;

    /// All-zero parameters and identity normalisation.
    static MlpModel zeros(std::vector<int> layer_sizes);
    /// Uniform in [-0.5, 0.5] / sqrt(fan_in), deterministic in `seed`.
    static MlpModel random(std::vector<int> layer_sizes, std::uint64_t seed);

    Eigen::Index parameter_count() const;
    /// Layer by layer: weights row-major, then biases.
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& w);

    /// Throws StructuralError when shapes do not chain or maps mismatch.
    void validate() const;

    /// Network output for an already-normalised input.
    double forward_normalized(const Eigen::VectorXd& x) const;
    /// Raw features in, denormalised prediction out.
    double predict(const Eigen::VectorXd& features) const;
    double predict(const dataset::Features& features) const;
};

/// Normalised outputs for normalised inputs (one sample per row).
Eigen::VectorXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& x_norm,
                              Execution exec = Execution::parallel);

/// d output / d parameter for every sample (rows) and parameter (columns, in
/// `parameters()` order), by backpropagation on normalised inputs.
Eigen::MatrixXd jacobian(const MlpModel& model, const Eigen::MatrixXd& x_norm,
                         Execution exec = Execution::parallel);

/// Solves (J^T J + mu I) dw = J^T e by Cholesky. Throws TrainingError when
/// the factorisation fails.
Eigen::VectorXd lm_step(const Eigen::MatrixXd& jtj, const Eigen::VectorXd& jte, double mu);
Eigen::VectorXd lm_step_from_jacobian(const Eigen::MatrixXd& j, const Eigen::VectorXd& e, double mu);

struct TrainConfig {
    std::vector<int> hidden_layers{20, 20};
    double mu_init = 1e-3;
    double mu_inc = 10.0;
    double mu_dec = 0.1;
    double mu_max = 1e10;
    int max_epochs = 1000;
    int max_val_failures = 6;
    double min_gradient = 1e-7;
    std::uint64_t init_seed = 1;
    int restarts = 10;

    void validate() const;
};

enum class StopReason { val_failures, max_epochs, min_gradient, mu_limit };
std::string to_string(StopReason r);

struct TrainReport {
    int epochs_run = 0;
    double final_mu = 0.0;
    /// Mean squared error on normalised targets after each epoch.
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    StopReason stop_reason = StopReason::max_epochs;
    int best_epoch = 0;
    double best_val_loss = 0.0;
    /// Which restart produced the returned model, and every restart's best
    /// validation loss.
    int restart = 0;
    std::vector<double> restart_val_losses;
};

struct TrainResult {
    MlpModel model;
    TrainReport report;
};

/// One Levenberg-Marquardt run from `init` (parameters only; the maps are
/// fitted from the train rows). Weights are restored from the epoch with the
/// lowest validation loss.
TrainResult train_lm_once(const dataset::Dataset& data, const TrainConfig& config, MlpModel init);

/// `config.restarts` runs with seeds derived from `init_seed`; returns the
/// one with the lowest validation loss. Requires non-empty train and val
/// splits.
TrainResult train_lm(const dataset::Dataset& data, const TrainConfig& config);

/// Predictions for every row of `data`.
std::vector<double> predict(const MlpModel& model, const dataset::Dataset& data);

/// Versioned JSON: layer sizes, row-major weights, biases, both maps.
void save_model(std::ostream& out, const MlpModel& model);
MlpModel load_model(std::istream& in, const std::string& source = "<input>");
void save_model(const std::string& path, const MlpModel& model);
MlpModel load_model(const std::string& path);

void write_report_json(std::ostream& out, const TrainReport& report);

}  // namespace kbarrier::mlp
