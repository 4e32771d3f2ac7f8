#include "kbarrier/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "kbarrier/error.hpp"
#include "kbarrier/rng.hpp"

namespace kbarrier::mlp {

namespace {

constexpr int kModelFormatVersion = 1;
constexpr std::uint64_t kRestartStream = 0x6D6C70;  // "mlp"
// tanh(20) rounds to 1 in double precision.
constexpr double kTansigClamp = 20.0;

double mse(const Eigen::VectorXd& e) { return e.size() == 0 ? 0.0 : e.squaredNorm() / static_cast<double>(e.size()); }

struct Normalized {
    Eigen::MatrixXd x;
    Eigen::VectorXd t;
};

Eigen::MatrixXd feature_matrix(const dataset::Dataset& data, const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), dataset::kFeatureCount);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto f = data.samples[rows[r]].features();
        for (int c = 0; c < dataset::kFeatureCount; ++c) x(static_cast<Eigen::Index>(r), c) = f[static_cast<std::size_t>(c)];
    }
    return x;
}

Eigen::VectorXd label_vector(const dataset::Dataset& data, const std::vector<std::size_t>& rows) {
    Eigen::VectorXd t(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) t(static_cast<Eigen::Index>(r)) = data.samples[rows[r]].barriers;
    return t;
}

Normalized normalize(const MlpModel& m, const Eigen::MatrixXd& x, const Eigen::VectorXd& t) {
    Normalized out{Eigen::MatrixXd(x.rows(), x.cols()), Eigen::VectorXd(t.size())};
    for (Eigen::Index r = 0; r < x.rows(); ++r) out.x.row(r) = m.input_map.apply(x.row(r).transpose()).transpose();
    for (Eigen::Index r = 0; r < t.size(); ++r) out.t(r) = m.output_map.apply(Eigen::VectorXd::Constant(1, t(r)))(0);
    return out;
}

// Activations of every layer for one normalised input.
void forward_layers(const MlpModel& m, const Eigen::VectorXd& x, std::vector<Eigen::VectorXd>& acts) {
    const std::size_t layers = m.weights.size();
    acts.resize(layers + 1);
    acts[0] = x;
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::VectorXd z = m.weights[l] * acts[l] + m.biases[l];
        if (l + 1 < layers) z = z.unaryExpr([](double v) { return tansig(v); });
        acts[l + 1] = std::move(z);
    }
}

void jacobian_row(const MlpModel& m, const Eigen::VectorXd& x, std::vector<Eigen::VectorXd>& acts,
                  const std::vector<Eigen::Index>& offsets, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
    forward_layers(m, x, acts);
    const std::size_t layers = m.weights.size();
    Eigen::VectorXd delta = Eigen::VectorXd::Ones(1);  // d output / d z at the linear output
    for (std::size_t l = layers; l-- > 0;) {
        const Eigen::MatrixXd& w = m.weights[l];
        const Eigen::VectorXd& in = acts[l];
        Eigen::Index off = offsets[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) row(off++) = delta(r) * in(c);
        for (Eigen::Index r = 0; r < w.rows(); ++r) row(off++) = delta(r);
        if (l > 0) {
            const Eigen::VectorXd back = w.transpose() * delta;
            delta = back.array() * (1.0 - in.array().square());
        }
    }
}

std::vector<Eigen::Index> parameter_offsets(const MlpModel& m) {
    std::vector<Eigen::Index> offsets;
    Eigen::Index off = 0;
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        offsets.push_back(off);
        off += m.weights[l].size() + m.biases[l].size();
    }
    return offsets;
}

}  // namespace

double tansig(double n) {
    if (std::isnan(n)) return n;
    const double c = std::clamp(n, -kTansigClamp, kTansigClamp);
    return 2.0 / (1.0 + std::exp(-2.0 * c)) - 1.0;
}

// ---- normalisation ------------------------------------------------------------

MinMaxMap MinMaxMap::fit(const Eigen::MatrixXd& rows) {
    if (rows.rows() == 0) throw ValidationError("cannot fit a normalisation map to zero rows");
    return {rows.colwise().minCoeff().transpose(), rows.colwise().maxCoeff().transpose()};
}

MinMaxMap MinMaxMap::identity(Eigen::Index dims) {
    return {Eigen::VectorXd::Constant(dims, -1.0), Eigen::VectorXd::Constant(dims, 1.0)};
}

Eigen::VectorXd MinMaxMap::half_range() const {
    Eigen::VectorXd h = (hi - lo) / 2.0;
    for (Eigen::Index i = 0; i < h.size(); ++i)
        if (!(h(i) > 0.0)) h(i) = 1.0;
    return h;
}

Eigen::VectorXd MinMaxMap::apply(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd h = half_range();
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        out(i) = hi(i) > lo(i) ? (x(i) - lo(i)) / h(i) - 1.0 : x(i) - lo(i);
    return out;
}

Eigen::VectorXd MinMaxMap::invert(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd h = half_range();
    Eigen::VectorXd out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i)
        out(i) = hi(i) > lo(i) ? (y(i) + 1.0) * h(i) + lo(i) : y(i) + lo(i);
    return out;
}

// ---- model --------------------------------------------------------------------

MlpModel MlpModel::zeros(std::vector<int> sizes) {
    MlpModel m;
    m.layer_sizes = std::move(sizes);
    if (m.layer_sizes.size() < 2) throw StructuralError("a network needs at least an input and an output layer");
    for (int s : m.layer_sizes)
        if (s < 1) throw StructuralError("layer sizes must be >= 1");
    for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
        m.weights.push_back(Eigen::MatrixXd::Zero(m.layer_sizes[l + 1], m.layer_sizes[l]));
        m.biases.push_back(Eigen::VectorXd::Zero(m.layer_sizes[l + 1]));
    }
    m.input_map = MinMaxMap::identity(m.layer_sizes.front());
    m.output_map = MinMaxMap::identity(m.layer_sizes.back());
    return m;
}

MlpModel MlpModel::random(std::vector<int> sizes, std::uint64_t seed) {
    MlpModel m = zeros(std::move(sizes));
    rng::Engine eng(seed);
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(m.weights[l].cols()));
        for (Eigen::Index r = 0; r < m.weights[l].rows(); ++r)
            for (Eigen::Index c = 0; c < m.weights[l].cols(); ++c)
                m.weights[l](r, c) = (rng::uniform01(eng) - 0.5) * scale;
        for (Eigen::Index r = 0; r < m.biases[l].size(); ++r) m.biases[l](r) = (rng::uniform01(eng) - 0.5) * scale;
    }
    return m;
}

Eigen::Index MlpModel::parameter_count() const {
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

Eigen::VectorXd MlpModel::parameters() const {
    Eigen::VectorXd w(parameter_count());
    Eigen::Index off = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (Eigen::Index r = 0; r < weights[l].rows(); ++r)
            for (Eigen::Index c = 0; c < weights[l].cols(); ++c) w(off++) = weights[l](r, c);
        for (Eigen::Index r = 0; r < biases[l].size(); ++r) w(off++) = biases[l](r);
    }
    return w;
}

void MlpModel::set_parameters(const Eigen::VectorXd& w) {
    if (w.size() != parameter_count())
        throw StructuralError("parameter vector has " + std::to_string(w.size()) + " entries, model needs " +
                              std::to_string(parameter_count()));
    Eigen::Index off = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (Eigen::Index r = 0; r < weights[l].rows(); ++r)
            for (Eigen::Index c = 0; c < weights[l].cols(); ++c) weights[l](r, c) = w(off++);
        for (Eigen::Index r = 0; r < biases[l].size(); ++r) biases[l](r) = w(off++);
    }
}

void MlpModel::validate() const {
    if (layer_sizes.size() < 2) throw StructuralError("a network needs at least an input and an output layer");
    if (layer_sizes.back() != 1) throw StructuralError("the output layer must have exactly one neuron");
    if (weights.size() + 1 != layer_sizes.size() || biases.size() != weights.size())
        throw StructuralError("layer count does not match layer_sizes");
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l] ||
            biases[l].size() != layer_sizes[l + 1])
            throw StructuralError("layer " + std::to_string(l) + " shape does not chain");
    }
    if (input_map.dims() != layer_sizes.front() || input_map.hi.size() != input_map.lo.size())
        throw StructuralError("input normalisation has the wrong dimension");
    if (output_map.dims() != 1 || output_map.hi.size() != 1) throw StructuralError("output normalisation must be 1-D");
}

double MlpModel::forward_normalized(const Eigen::VectorXd& x) const {
    if (weights.empty() || x.size() != weights.front().cols())
        throw StructuralError("input has " + std::to_string(x.size()) + " features, model expects " +
                              std::to_string(layer_sizes.empty() ? 0 : layer_sizes.front()));
    std::vector<Eigen::VectorXd> acts;
    forward_layers(*this, x, acts);
    return acts.back()(0);
}

double MlpModel::predict(const Eigen::VectorXd& features) const {
    if (features.size() != input_map.dims())
        throw StructuralError("input has " + std::to_string(features.size()) + " features, model expects " +
                              std::to_string(input_map.dims()));
    const double y = forward_normalized(input_map.apply(features));
    return output_map.invert(Eigen::VectorXd::Constant(1, y))(0);
}

double MlpModel::predict(const dataset::Features& features) const {
    return predict(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(features.data(), dataset::kFeatureCount)));
}

// ---- kernels ------------------------------------------------------------------

Eigen::VectorXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& x_norm, Execution exec) {
    const Eigen::Index n = x_norm.rows();
    Eigen::VectorXd y(n);
    if (exec == Execution::parallel) {
#pragma omp parallel
        {
            std::vector<Eigen::VectorXd> acts;
#pragma omp for schedule(static)
            for (Eigen::Index i = 0; i < n; ++i) {
                forward_layers(model, x_norm.row(i).transpose(), acts);
                y(i) = acts.back()(0);
            }
        }
    } else {
        std::vector<Eigen::VectorXd> acts;
        for (Eigen::Index i = 0; i < n; ++i) {
            forward_layers(model, x_norm.row(i).transpose(), acts);
            y(i) = acts.back()(0);
        }
    }
    return y;
}

Eigen::MatrixXd jacobian(const MlpModel& model, const Eigen::MatrixXd& x_norm, Execution exec) {
    model.validate();
    if (x_norm.cols() != model.layer_sizes.front()) throw StructuralError("jacobian input has the wrong width");
    const Eigen::Index n = x_norm.rows();
    const auto offsets = parameter_offsets(model);
    Eigen::MatrixXd j(n, model.parameter_count());
    if (exec == Execution::parallel) {
#pragma omp parallel
        {
            std::vector<Eigen::VectorXd> acts;
#pragma omp for schedule(static)
            for (Eigen::Index i = 0; i < n; ++i) jacobian_row(model, x_norm.row(i).transpose(), acts, offsets, j.row(i));
        }
    } else {
        std::vector<Eigen::VectorXd> acts;
        for (Eigen::Index i = 0; i < n; ++i) jacobian_row(model, x_norm.row(i).transpose(), acts, offsets, j.row(i));
    }
    return j;
}

Eigen::VectorXd lm_step(const Eigen::MatrixXd& jtj, const Eigen::VectorXd& jte, double mu) {
    Eigen::MatrixXd a = jtj;
    a.diagonal().array() += mu;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw TrainingError("J^T J + mu I is not positive definite at mu=" + std::to_string(mu));
    Eigen::VectorXd dw = llt.solve(jte);
    if (!dw.allFinite()) throw TrainingError("non-finite Levenberg-Marquardt step at mu=" + std::to_string(mu));
    return dw;
}

Eigen::VectorXd lm_step_from_jacobian(const Eigen::MatrixXd& j, const Eigen::VectorXd& e, double mu) {
    return lm_step(j.transpose() * j, j.transpose() * e, mu);
}

// ---- training -----------------------------------------------------------------

void TrainConfig::validate() const {
    if (hidden_layers.empty()) throw ValidationError("hidden_layers must list at least one layer");
    for (int h : hidden_layers)
        if (h < 1) throw ValidationError("every hidden layer needs at least one neuron");
    if (!(mu_init > 0.0)) throw ValidationError("mu_init must be positive");
    if (!(mu_inc > 1.0)) throw ValidationError("mu_inc must exceed 1");
    if (!(mu_dec > 0.0 && mu_dec < 1.0)) throw ValidationError("mu_dec must lie in (0, 1)");
    if (!(mu_max >= mu_init)) throw ValidationError("mu_max must be >= mu_init");
    if (max_epochs < 1) throw ValidationError("max_epochs must be >= 1");
    if (max_val_failures < 1) throw ValidationError("max_val_failures must be >= 1");
    if (!(min_gradient > 0.0)) throw ValidationError("min_gradient must be positive");
    if (restarts < 1) throw ValidationError("restarts must be >= 1");
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::val_failures: return "val_failures";
        case StopReason::max_epochs: return "max_epochs";
        case StopReason::min_gradient: return "min_gradient";
        case StopReason::mu_limit: return "mu_limit";
    }
    return "?";
}

TrainResult train_lm_once(const dataset::Dataset& data, const TrainConfig& config, MlpModel model) {
    config.validate();
    const auto train_rows = data.rows(dataset::Split::train);
    const auto val_rows = data.rows(dataset::Split::val);
    if (train_rows.empty() || val_rows.empty())
        throw ValidationError("training needs non-empty train and val splits");

    const Eigen::MatrixXd x_train = feature_matrix(data, train_rows);
    const Eigen::VectorXd t_train = label_vector(data, train_rows);
    model.input_map = MinMaxMap::fit(x_train);
    model.output_map = MinMaxMap::fit(t_train);
    model.validate();
    if (model.layer_sizes.front() != dataset::kFeatureCount)
        throw StructuralError("model expects " + std::to_string(model.layer_sizes.front()) + " inputs, dataset has 4");

    const Normalized train = normalize(model, x_train, t_train);
    const Normalized val = normalize(model, feature_matrix(data, val_rows), label_vector(data, val_rows));

    TrainReport report;
    double mu = config.mu_init;
    Eigen::VectorXd w = model.parameters();
    Eigen::VectorXd e = train.t - forward_batch(model, train.x);
    double sse = e.squaredNorm();
    double best_val = mse(val.t - forward_batch(model, val.x));
    Eigen::VectorXd best_w = w;
    int failures = 0;
    bool stopped = false;

    for (int epoch = 1; epoch <= config.max_epochs && !stopped; ++epoch) {
        const Eigen::MatrixXd j = jacobian(model, train.x);
        const Eigen::VectorXd g = j.transpose() * e;
        if (g.norm() < config.min_gradient) {
            report.stop_reason = StopReason::min_gradient;
            break;
        }
        const Eigen::MatrixXd jtj = j.transpose() * j;
        bool accepted = false;
        while (!accepted) {
            Eigen::VectorXd step;
            try {
                step = lm_step(jtj, g, mu);
            } catch (const TrainingError& err) {
                mu *= config.mu_inc;
                if (mu > config.mu_max)
                    throw TrainingError(std::string(err.what()) + "; mu exceeded its cap (stop_reason=mu_limit)");
                continue;
            }
            model.set_parameters(w + step);
            const Eigen::VectorXd e_new = train.t - forward_batch(model, train.x);
            const double sse_new = e_new.squaredNorm();
            if (std::isfinite(sse_new) && sse_new < sse) {
                w += step;
                e = e_new;
                sse = sse_new;
                mu *= config.mu_dec;
                accepted = true;
            } else {
                mu *= config.mu_inc;
                if (mu > config.mu_max) {
                    model.set_parameters(w);
                    report.stop_reason = StopReason::mu_limit;
                    stopped = true;
                    break;
                }
            }
        }
        if (!accepted) break;

        const double val_loss = mse(val.t - forward_batch(model, val.x));
        report.epochs_run = epoch;
        report.train_loss.push_back(sse / static_cast<double>(e.size()));
        report.val_loss.push_back(val_loss);
        if (val_loss < best_val) {
            best_val = val_loss;
            best_w = w;
            report.best_epoch = epoch;
            failures = 0;
        } else if (val_loss > best_val) {
            if (++failures >= config.max_val_failures) {
                report.stop_reason = StopReason::val_failures;
                stopped = true;
            }
        }
        if (epoch == config.max_epochs) report.stop_reason = StopReason::max_epochs;
    }

    model.set_parameters(best_w);
    report.final_mu = mu;
    report.best_val_loss = best_val;
    report.restart_val_losses = {best_val};
    return {std::move(model), std::move(report)};
}

TrainResult train_lm(const dataset::Dataset& data, const TrainConfig& config) {
    config.validate();
    std::vector<int> sizes{dataset::kFeatureCount};
    sizes.insert(sizes.end(), config.hidden_layers.begin(), config.hidden_layers.end());
    sizes.push_back(1);

    std::vector<double> losses;
    TrainResult best;
    for (int r = 0; r < config.restarts; ++r) {
        const auto seed = rng::derive_seed(config.init_seed, kRestartStream, static_cast<std::uint64_t>(r));
        TrainResult run = train_lm_once(data, config, MlpModel::random(sizes, seed));
        losses.push_back(run.report.best_val_loss);
        if (r == 0 || run.report.best_val_loss < best.report.best_val_loss) {
            best = std::move(run);
            best.report.restart = r;
        }
    }
    best.report.restart_val_losses = std::move(losses);
    return best;
}

std::vector<double> predict(const MlpModel& model, const dataset::Dataset& data) {
    std::vector<double> out;
    out.reserve(data.size());
    for (const auto& s : data.samples) out.push_back(model.predict(s.features()));
    return out;
}

// ---- persistence --------------------------------------------------------------

namespace {

nlohmann::json map_to_json(const MinMaxMap& m) {
    return {{"lo", std::vector<double>(m.lo.data(), m.lo.data() + m.lo.size())},
            {"hi", std::vector<double>(m.hi.data(), m.hi.data() + m.hi.size())}};
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

MinMaxMap map_from_json(const nlohmann::json& j) {
    return {to_vector(j.at("lo").get<std::vector<double>>()), to_vector(j.at("hi").get<std::vector<double>>())};
}

}  // namespace

void save_model(std::ostream& out, const MlpModel& model) {
    model.validate();
    nlohmann::ordered_json j;
    j["format"] = "kbarrier-mlp";
    j["version"] = kModelFormatVersion;
    j["layer_sizes"] = model.layer_sizes;
    j["hidden_activation"] = "tansig";
    j["output_activation"] = "linear";
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        std::vector<double> w;
        for (Eigen::Index r = 0; r < model.weights[l].rows(); ++r)
            for (Eigen::Index c = 0; c < model.weights[l].cols(); ++c) w.push_back(model.weights[l](r, c));
        layers.push_back({{"rows", model.weights[l].rows()},
                          {"cols", model.weights[l].cols()},
                          {"weights", w},
                          {"bias", std::vector<double>(model.biases[l].data(),
                                                       model.biases[l].data() + model.biases[l].size())}});
    }
    j["layers"] = std::move(layers);
    j["input_map"] = map_to_json(model.input_map);
    j["output_map"] = map_to_json(model.output_map);
    out << j.dump(1) << '\n';
}

MlpModel load_model(std::istream& in, const std::string& source) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source + ": " + e.what());
    }
    try {
        if (j.value("format", "") != "kbarrier-mlp") throw ParseError(source + ": not a kbarrier model file");
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion)
            throw ParseError(source + ": unsupported model version " + std::to_string(version));
        MlpModel m = MlpModel::zeros(j.at("layer_sizes").get<std::vector<int>>());
        const auto& layers = j.at("layers");
        if (layers.size() != m.weights.size()) throw StructuralError(source + ": layer count mismatch");
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            const auto w = layers[l].at("weights").get<std::vector<double>>();
            const auto b = layers[l].at("bias").get<std::vector<double>>();
            if (static_cast<Eigen::Index>(w.size()) != m.weights[l].size() ||
                static_cast<Eigen::Index>(b.size()) != m.biases[l].size())
                throw StructuralError(source + ": layer " + std::to_string(l) + " has the wrong shape");
            std::size_t k = 0;
            for (Eigen::Index r = 0; r < m.weights[l].rows(); ++r)
                for (Eigen::Index c = 0; c < m.weights[l].cols(); ++c) m.weights[l](r, c) = w[k++];
            m.biases[l] = to_vector(b);
        }
        m.input_map = map_from_json(j.at("input_map"));
        m.output_map = map_from_json(j.at("output_map"));
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source + ": " + e.what());
    }
}

void save_model(const std::string& path, const MlpModel& model) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file: " + path);
    save_model(out, model);
    if (!out) throw IoError("failed writing model file: " + path);
}

MlpModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("model file not found: " + path);
    return load_model(in, path);
}

void write_report_json(std::ostream& out, const TrainReport& report) {
    nlohmann::ordered_json j;
    j["epochs_run"] = report.epochs_run;
    j["final_mu"] = report.final_mu;
    j["stop_reason"] = to_string(report.stop_reason);
    j["best_epoch"] = report.best_epoch;
    j["best_val_loss"] = report.best_val_loss;
    j["restart"] = report.restart;
    j["restart_val_losses"] = report.restart_val_losses;
    j["train_loss"] = report.train_loss;
    j["val_loss"] = report.val_loss;
    out << j.dump(2) << '\n';
}

}  // namespace kbarrier::mlp
