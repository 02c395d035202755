#pragma once

#include "svdgcn/common.hpp"
#include "svdgcn/datasets.hpp"
#include "svdgcn/layers.hpp"

#include <cstdint>
#include <vector>

namespace svdgcn {

struct AdamConfig {
  double lr = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 5e-4;  // coupled L2: added to the gradient
};

/// First/second moment accumulators, one tensor per parameter tensor.
struct AdamState {
  std::int64_t step = 0;
  Gradients m;
  Gradients v;
};

AdamState make_adam_state(const SvdGcnModel& model);

/// Elementwise bias-corrected update of one tensor; `step` is 1-based.
void adam_update(double* param, double* m, double* v, const double* grad,
                 std::ptrdiff_t n, std::int64_t step, const AdamConfig& cfg);

/// One optimizer step over every parameter tensor of the model.
void adam_step(AdamState& state, SvdGcnModel& model, const Gradients& grads,
               const AdamConfig& cfg);

/// Mean negative log softmax probability of the true class over the masked
/// nodes, stabilized by row-max subtraction.
double cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                     const std::vector<char>& mask);

/// d(cross_entropy)/d(logits): (softmax - onehot) / |mask| on masked rows.
Matrix cross_entropy_gradient(const Matrix& logits,
                              const std::vector<int>& labels,
                              const std::vector<char>& mask);

/// Fraction of masked nodes whose argmax logit matches the label; argmax
/// ties resolve to the lowest class index.
double evaluate(const SvdGcnModel& model, const NodeDataset& ds,
                const std::vector<char>& mask);

/// x + sigma * N(0, 1) elementwise, seeded.
Matrix inject_noise(const Matrix& x, double sigma, std::uint64_t seed);

struct TrainConfig {
  int epochs = 200;
  double lr = 0.005;
  double weight_decay = 5e-4;
  int hidden = 32;
  double dropout = 0.1;  // input features, training passes only
  std::uint64_t seed = 1;
  Family family = Family::Linear;
  double alpha = 1.0;
  double scale = 1.5;
  int levels = 1;
  int cheb_degree = 10;
  ModelVariant variant = ModelVariant::FrameletI;
  Activation activation = Activation::ReLU;
  bool raw_scale = false;
  bool transpose_adjacency = false;
  int dense_threshold = 4096;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_acc = 0.0;
  double test_acc = 0.0;
};

struct TrainResult {
  SvdGcnModel model;  // parameters restored to the best-validation epoch
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_val_acc = 0.0;
  double test_accuracy = 0.0;
};

/// Builds the operator bank for the configured variant (SVD + exact bank
/// for framelet1/2, Chebyshev bank for framelet3, none for plain) and
/// initializes parameters.
SvdGcnModel build_model(const NodeDataset& ds, const TrainConfig& cfg);

CheckpointMeta checkpoint_meta(const TrainConfig& cfg);

/// Full-batch training with the configured optimizer; keeps the parameters
/// of the best validation epoch (ties resolve to the latest). Deterministic
/// for a fixed (dataset, config, seed).
TrainResult train(const NodeDataset& ds, const TrainConfig& cfg);

}  // namespace svdgcn
