#include "osamtl/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "osamtl/rng.hpp"

namespace osamtl {

namespace {

constexpr double kBceClampLo = 1e-7;
constexpr double kBceClampHi = 1.0 - 1e-7;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Layout {
    // one_hidden offsets into the flat parameter vector
    std::size_t w1 = 0;
    std::size_t b1 = 0;
    std::size_t w2 = 0;
    std::size_t b2 = 0;
};

Layout layout_of(const ModelParams& params) {
    Layout l;
    const auto dim = static_cast<std::size_t>(params.input_dim);
    const auto width = static_cast<std::size_t>(params.hidden_width);
    l.w1 = 0;
    l.b1 = width * dim;
    l.w2 = l.b1 + width;
    l.b2 = l.w2 + width;
    return l;
}

std::size_t expected_size(Architecture arch, int dim, int width) {
    if (arch == Architecture::linear) return static_cast<std::size_t>(dim) + 1;
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(dim) +
           2 * static_cast<std::size_t>(width) + 1;
}

void check_features(const ModelParams& params, std::span<const double> features) {
    if (features.size() != static_cast<std::size_t>(params.input_dim)) {
        throw DataError("feature vector of length " + std::to_string(features.size()) +
                        " does not match model input dimension " +
                        std::to_string(params.input_dim));
    }
}

// Forward pass keeping the hidden activations for backprop.
struct Forward {
    double output = 0.0;
    std::vector<double> hidden; // tanh activations, one_hidden only
};

Forward forward(const ModelParams& params, std::span<const double> x) {
    Forward f;
    if (params.architecture == Architecture::linear) {
        double z = params.values[static_cast<std::size_t>(params.input_dim)];
        for (int j = 0; j < params.input_dim; ++j) {
            z += params.values[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        }
        f.output = sigmoid(z);
    } else {
        const Layout l = layout_of(params);
        const auto dim = static_cast<std::size_t>(params.input_dim);
        f.hidden.resize(static_cast<std::size_t>(params.hidden_width));
        double z = params.values[l.b2];
        for (std::size_t k = 0; k < f.hidden.size(); ++k) {
            double a = params.values[l.b1 + k];
            const double* row = params.values.data() + l.w1 + k * dim;
            for (std::size_t j = 0; j < dim; ++j) a += row[j] * x[j];
            f.hidden[k] = std::tanh(a);
            z += params.values[l.w2 + k] * f.hidden[k];
        }
        f.output = sigmoid(z);
    }
    // Keep the contract output strictly inside (0, 1) even for saturated z.
    f.output = std::clamp(f.output, 1e-12, 1.0 - 1e-12);
    return f;
}

// d(joint loss)/d(pre-sigmoid z) for one example.
double loss_grad_z(double y, std::span<const double> targets, const LossConfig& config) {
    if (config.base_loss == BaseLoss::binary_cross_entropy) {
        // The clamped loss is locally constant in y outside the clamp range.
        if (y < kBceClampLo || y > kBceClampHi) return 0.0;
        double g = 0.0;
        for (std::size_t c = 0; c < targets.size(); ++c) {
            g += config.alphas[c] * (y - targets[c]);
        }
        return g;
    }
    double dy = 0.0;
    for (std::size_t c = 0; c < targets.size(); ++c) {
        dy += config.alphas[c] * 2.0 * (y - targets[c]);
    }
    return dy * y * (1.0 - y);
}

} // namespace

ModelParams ModelParams::linear(int input_dim) {
    ModelParams p;
    p.architecture = Architecture::linear;
    p.input_dim = input_dim;
    p.hidden_width = 0;
    p.values.assign(expected_size(p.architecture, input_dim, 0), 0.0);
    return p;
}

ModelParams ModelParams::one_hidden(int input_dim, int width) {
    ModelParams p;
    p.architecture = Architecture::one_hidden;
    p.input_dim = input_dim;
    p.hidden_width = width;
    p.values.assign(expected_size(p.architecture, input_dim, width), 0.0);
    return p;
}

bool ModelParams::same_shape(const ModelParams& other) const {
    return architecture == other.architecture && input_dim == other.input_dim &&
           hidden_width == other.hidden_width && values.size() == other.values.size();
}

ModelParams init_params(Architecture architecture, int input_dim, int hidden_width,
                        std::uint64_t seed) {
    if (input_dim < 1) throw ConfigError("model input dimension must be positive");
    if (architecture == Architecture::one_hidden && hidden_width < 1) {
        throw ConfigError("hidden width must be positive for the one_hidden architecture");
    }
    ModelParams p = architecture == Architecture::linear
                        ? ModelParams::linear(input_dim)
                        : ModelParams::one_hidden(input_dim, hidden_width);
    Rng rng(seed);
    if (architecture == Architecture::linear) {
        for (int j = 0; j < input_dim; ++j) {
            p.values[static_cast<std::size_t>(j)] = rng.uniform(-0.1, 0.1);
        }
        // bias stays 0
    } else {
        const Layout l = layout_of(p);
        for (std::size_t i = 0; i < l.b1; ++i) p.values[i] = rng.uniform(-0.1, 0.1);
        for (std::size_t k = 0; k < static_cast<std::size_t>(hidden_width); ++k) {
            p.values[l.w2 + k] = rng.uniform(-0.1, 0.1);
        }
        // b1 and b2 stay 0
    }
    return p;
}

void LossConfig::validate() const {
    if (alphas.empty()) throw ConfigError("loss config needs at least one alpha weight");
    double sum = 0.0;
    for (double a : alphas) {
        if (!std::isfinite(a) || a < 0.0) {
            throw ConfigError("alpha weights must be finite and non-negative");
        }
        sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw ConfigError("alpha weights must sum to 1, got " + std::to_string(sum));
    }
}

LossConfig LossConfig::uniform(BaseLoss base_loss, int p) {
    if (p < 1) throw ConfigError("uniform loss config needs at least one target slot");
    LossConfig config;
    config.base_loss = base_loss;
    config.alphas.assign(static_cast<std::size_t>(p), 1.0 / static_cast<double>(p));
    return config;
}

void OptimConfig::validate() const {
    if (!std::isfinite(learning_rate) || learning_rate < 0.0) {
        throw ConfigError("learning rate must be finite and non-negative");
    }
    if (epochs < 1) throw ConfigError("epochs must be positive");
    if (batch_size < 1) throw ConfigError("batch size must be positive");
    if (optimizer == OptimizerKind::momentum &&
        (momentum_beta < 0.0 || momentum_beta >= 1.0)) {
        throw ConfigError("momentum beta must lie in [0, 1)");
    }
}

double predict(const ModelParams& params, std::span<const double> features) {
    check_features(params, features);
    return forward(params, features).output;
}

double joint_loss(double prediction, std::span<const double> targets, const LossConfig& config) {
    config.validate();
    if (targets.size() != config.alphas.size()) {
        throw ConfigError("got " + std::to_string(targets.size()) + " targets for " +
                          std::to_string(config.alphas.size()) + " alpha weights");
    }
    if (config.base_loss == BaseLoss::binary_cross_entropy &&
        (prediction <= 0.0 || prediction >= 1.0)) {
        throw DataError("binary cross entropy needs a prediction strictly inside (0, 1)");
    }
    double total = 0.0;
    for (std::size_t c = 0; c < targets.size(); ++c) {
        double term;
        if (config.base_loss == BaseLoss::squared_error) {
            const double diff = prediction - targets[c];
            term = diff * diff;
        } else {
            const double y = std::clamp(prediction, kBceClampLo, kBceClampHi);
            term = -(targets[c] * std::log(y) + (1.0 - targets[c]) * std::log(1.0 - y));
        }
        total += config.alphas[c] * term;
    }
    return total;
}

std::vector<double> joint_loss_gradient(const ModelParams& params,
                                        std::span<const TrainingExample> batch,
                                        const LossConfig& loss) {
    loss.validate();
    if (batch.empty()) throw DataError("gradient of an empty batch is undefined");

    std::vector<double> grad(params.values.size(), 0.0);
    const Layout l = layout_of(params);
    const auto dim = static_cast<std::size_t>(params.input_dim);

    for (const TrainingExample& example : batch) {
        check_features(params, example.features);
        if (example.targets.size() != loss.alphas.size()) {
            throw ConfigError("training example carries " +
                              std::to_string(example.targets.size()) + " targets, expected " +
                              std::to_string(loss.alphas.size()));
        }
        const Forward f = forward(params, example.features);
        const double gz = loss_grad_z(f.output, example.targets, loss);
        if (params.architecture == Architecture::linear) {
            for (std::size_t j = 0; j < dim; ++j) grad[j] += gz * example.features[j];
            grad[dim] += gz;
        } else {
            for (std::size_t k = 0; k < f.hidden.size(); ++k) {
                grad[l.w2 + k] += gz * f.hidden[k];
                const double ga = gz * params.values[l.w2 + k] * (1.0 - f.hidden[k] * f.hidden[k]);
                grad[l.b1 + k] += ga;
                double* row = grad.data() + l.w1 + k * dim;
                for (std::size_t j = 0; j < dim; ++j) row[j] += ga * example.features[j];
            }
            grad[l.b2] += gz;
        }
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (double& g : grad) g *= inv;
    return grad;
}

TrainReport train(const ModelParams& initial, const TrainingSet& data, const LossConfig& loss,
                  const OptimConfig& optim) {
    loss.validate();
    optim.validate();
    if (data.examples.empty()) throw DataError("training set is empty");
    if (static_cast<std::size_t>(data.targets_per_instance) != loss.alphas.size()) {
        throw ConfigError("training set carries " + std::to_string(data.targets_per_instance) +
                          " targets per instance but the loss has " +
                          std::to_string(loss.alphas.size()) + " alpha weights");
    }
    const auto start = std::chrono::steady_clock::now();

    ModelParams params = initial;
    std::vector<double> velocity(params.values.size(), 0.0);
    std::vector<std::size_t> order(data.examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(optim.seed);

    TrainReport report;
    report.loss_per_epoch.reserve(static_cast<std::size_t>(optim.epochs));

    std::vector<TrainingExample> batch;
    batch.reserve(static_cast<std::size_t>(optim.batch_size));

    for (int epoch = 0; epoch < optim.epochs; ++epoch) {
        // Fisher-Yates over the seeded stream; epochs continue the stream.
        for (std::size_t i = order.size() - 1; i > 0; --i) {
            std::swap(order[i], order[rng.index(i + 1)]);
        }

        std::size_t cursor = 0;
        while (cursor < order.size()) {
            const std::size_t end =
                std::min(cursor + static_cast<std::size_t>(optim.batch_size), order.size());
            batch.clear();
            for (std::size_t i = cursor; i < end; ++i) {
                batch.push_back(data.examples[order[i]]);
            }
            const std::vector<double> grad = joint_loss_gradient(params, batch, loss);
            if (optim.optimizer == OptimizerKind::momentum) {
                for (std::size_t i = 0; i < params.values.size(); ++i) {
                    velocity[i] = optim.momentum_beta * velocity[i] + grad[i];
                    params.values[i] -= optim.learning_rate * velocity[i];
                }
            } else {
                for (std::size_t i = 0; i < params.values.size(); ++i) {
                    params.values[i] -= optim.learning_rate * grad[i];
                }
            }
            cursor = end;
        }
        // End-of-epoch loss over the dataset in stored order, so the curve
        // is independent of the shuffle.
        double epoch_loss = 0.0;
        for (const TrainingExample& example : data.examples) {
            epoch_loss += joint_loss(predict(params, example.features), example.targets, loss);
        }
        epoch_loss /= static_cast<double>(data.examples.size());
        if (!std::isfinite(epoch_loss)) {
            throw DivergenceError("training diverged at epoch " + std::to_string(epoch + 1),
                                  epoch + 1);
        }
        report.loss_per_epoch.push_back(epoch_loss);
    }

    for (double v : params.values) {
        if (!std::isfinite(v)) {
            throw DivergenceError("parameters went non-finite by epoch " +
                                      std::to_string(optim.epochs),
                                  optim.epochs);
        }
    }

    report.final_params = std::move(params);
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace osamtl
