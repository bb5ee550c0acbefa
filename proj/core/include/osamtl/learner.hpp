// Differentiable learning model (linear or one-hidden-layer), the weighted
// multi-target joint loss, its analytic gradient, and seeded mini-batch
// gradient-descent training.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "osamtl/errors.hpp"

namespace osamtl {

enum class Architecture { linear, one_hidden };

// Flat parameter vector with a fixed layout.
// linear:      [w(dim), b]
// one_hidden:  [W1 row-major (width x dim), b1(width), w2(width), b2]
struct ModelParams {
    Architecture architecture = Architecture::linear;
    int input_dim = 0;
    int hidden_width = 0; // 0 for linear
    std::vector<double> values;

    static ModelParams linear(int input_dim);
    static ModelParams one_hidden(int input_dim, int width);

    std::size_t size() const { return values.size(); }
    bool same_shape(const ModelParams& other) const;
};

// Seeded start: weights uniform in (-0.1, 0.1), biases zero.
ModelParams init_params(Architecture architecture, int input_dim, int hidden_width,
                        std::uint64_t seed);

enum class BaseLoss { binary_cross_entropy, squared_error };

struct LossConfig {
    BaseLoss base_loss = BaseLoss::binary_cross_entropy;
    // One weight per target slot; must be non-negative and sum to 1 within
    // 1e-12.
    std::vector<double> alphas;

    std::size_t target_count() const { return alphas.size(); }
    void validate() const; // throws ConfigError

    static LossConfig uniform(BaseLoss base_loss, int p);
};

enum class OptimizerKind { gradient_descent, momentum };

struct OptimConfig {
    double learning_rate = 0.1;
    int epochs = 50;
    int batch_size = 64;
    std::uint64_t seed = 0;
    OptimizerKind optimizer = OptimizerKind::gradient_descent;
    double momentum_beta = 0.9; // used only by momentum

    void validate() const; // throws ConfigError
};

// One training example: features plus its p target values.
struct TrainingExample {
    std::vector<double> features;
    std::vector<double> targets;
};

struct TrainingSet {
    std::vector<TrainingExample> examples;
    int targets_per_instance = 0;
};

struct TrainReport {
    std::vector<double> loss_per_epoch; // mean joint loss per epoch
    ModelParams final_params;
    double wall_time_seconds = 0.0;
};

// Model output, strictly inside (0, 1).
double predict(const ModelParams& params, std::span<const double> features);

// sum over c of alpha_c * base_loss(prediction, target_c). Predictions are
// clamped to [1e-7, 1 - 1e-7] inside the BCE logs.
double joint_loss(double prediction, std::span<const double> targets, const LossConfig& config);

// Analytic gradient of the mean joint loss over the batch, same layout as
// params.values.
std::vector<double> joint_loss_gradient(const ModelParams& params,
                                        std::span<const TrainingExample> batch,
                                        const LossConfig& loss);

// Seeded mini-batch gradient descent; bit-deterministic for a fixed seed.
// Throws DivergenceError naming the epoch if the loss goes non-finite.
TrainReport train(const ModelParams& initial, const TrainingSet& data, const LossConfig& loss,
                  const OptimConfig& optim);

} // namespace osamtl
