#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hf/lstm.hpp"
#include "hf/numerics.hpp"

namespace hf {

/// Affine readout on the final hidden state: y = W h + b.
struct DenseHead {
    Matrix w;  // out_dim x hidden_dim
    Vector b;  // out_dim

    static DenseHead init(std::size_t out_dim, std::size_t hidden_dim, Rng& rng);
};

enum class OptimizerKind { Sgd, Adam };
enum class LossKind { BinaryCrossEntropy, MeanSquaredError };

struct TrainingConfig {
    std::size_t epochs = 200;
    double learning_rate = 1e-3;
    std::size_t batch_size = 16;
    std::uint64_t seed = 1;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    LossKind loss = LossKind::BinaryCrossEntropy;
};

struct EpochRecord {
    std::size_t epoch;       // 1-based
    double train_loss;       // mean over the epoch's examples as visited
    double test_loss;        // mean over the eval set, model frozen after the epoch
};

struct TrainingTrace {
    std::vector<EpochRecord> epochs;
};

/// Tab-separated trace with header: epoch, train_loss, test_loss.
std::string trace_table(const TrainingTrace& trace);

/// Binary cross entropy with p clamped to [1e-12, 1 - 1e-12]. Returns
/// (loss, dloss/dp) where the derivative is taken at the clamped value.
std::pair<double, double> bce_loss(double p, double y);

/// Squared error. Returns (loss, dloss/dyhat).
std::pair<double, double> mse_loss(double yhat, double y);

/// values -= lr * grads, elementwise.
void sgd_step(std::vector<double>& values, const std::vector<double>& grads, double learning_rate);

/// First/second moment state for one parameter tensor.
struct AdamSlot {
    std::vector<double> m;
    std::vector<double> v;
};

/// Standard Adam update with bias correction; step counts from 1.
void adam_step(std::vector<double>& values, const std::vector<double>& grads, AdamSlot& slot,
               std::size_t step, const TrainingConfig& cfg);

/// One supervised sequence: per-timestep inputs and a scalar target.
struct Example {
    std::vector<Vector> inputs;
    double target = 0.0;
};

/// LSTM plus scalar head. sigmoid_output squashes the readout to (0, 1) for
/// classification; otherwise the readout is linear.
struct SequenceModel {
    LstmParams lstm;
    DenseHead head;
    bool sigmoid_output = false;
};

/// Model output for one sequence from the zero state: probability when
/// sigmoid_output, raw readout otherwise.
double model_output(const SequenceModel& m, const std::vector<Vector>& inputs);

/// Mean loss of the model over a set of examples, without touching parameters.
double evaluate_loss(const SequenceModel& m, const std::vector<Example>& data, LossKind loss);

/// Deterministic training loop: epochs of seeded-shuffle minibatches, gradient
/// averaging within each batch, one optimizer step per batch. Identical
/// (model, data, config) reruns produce identical parameters and traces.
/// Throws NumericalError naming epoch and batch if a non-finite loss appears.
TrainingTrace train(SequenceModel& model, const std::vector<Example>& data,
                    const std::vector<Example>& eval_data, const TrainingConfig& cfg);

}  // namespace hf
