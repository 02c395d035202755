#include "svdgcn/training.hpp"

#include "svdgcn/graph.hpp"
#include "svdgcn/spectral.hpp"

#include <cmath>
#include <iostream>
#include <random>

namespace svdgcn {

namespace {

Gradients zero_like(const SvdGcnModel& model) {
  Gradients g;
  g.theta.reserve(model.layer.theta.size());
  for (const Vector& t : model.layer.theta) {
    g.theta.push_back(Vector::Zero(t.size()));
  }
  g.weight = Matrix::Zero(model.layer.weight.rows(), model.layer.weight.cols());
  g.head_weight =
      Matrix::Zero(model.head.weight.rows(), model.head.weight.cols());
  g.head_bias = Eigen::RowVectorXd::Zero(model.head.bias.size());
  return g;
}

int masked_count(const std::vector<char>& mask) {
  int count = 0;
  for (char m : mask) count += m != 0;
  return count;
}

}  // namespace

AdamState make_adam_state(const SvdGcnModel& model) {
  AdamState state;
  state.m = zero_like(model);
  state.v = zero_like(model);
  return state;
}

void adam_update(double* param, double* m, double* v, const double* grad,
                 std::ptrdiff_t n, std::int64_t step, const AdamConfig& cfg) {
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double g = grad[i] + cfg.weight_decay * param[i];
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    param[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

void adam_step(AdamState& state, SvdGcnModel& model, const Gradients& grads,
               const AdamConfig& cfg) {
  if (grads.theta.size() != model.layer.theta.size()) {
    throw DimensionError("adam_step: gradient/parameter band mismatch");
  }
  state.step += 1;
  for (std::size_t b = 0; b < model.layer.theta.size(); ++b) {
    adam_update(model.layer.theta[b].data(), state.m.theta[b].data(),
                state.v.theta[b].data(), grads.theta[b].data(),
                model.layer.theta[b].size(), state.step, cfg);
  }
  adam_update(model.layer.weight.data(), state.m.weight.data(),
              state.v.weight.data(), grads.weight.data(),
              model.layer.weight.size(), state.step, cfg);
  adam_update(model.head.weight.data(), state.m.head_weight.data(),
              state.v.head_weight.data(), grads.head_weight.data(),
              model.head.weight.size(), state.step, cfg);
  adam_update(model.head.bias.data(), state.m.head_bias.data(),
              state.v.head_bias.data(), grads.head_bias.data(),
              model.head.bias.size(), state.step, cfg);
}

double cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                     const std::vector<char>& mask) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size() ||
      labels.size() != mask.size()) {
    throw DimensionError("cross_entropy: row/label/mask size mismatch");
  }
  const int count = masked_count(mask);
  if (count == 0) throw ConfigError("cross_entropy: empty mask");
  double total = 0.0;
  for (int i = 0; i < logits.rows(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= logits.cols()) {
      throw ConfigError("label " + std::to_string(label) +
                        " outside [0, " + std::to_string(logits.cols()) + ")");
    }
    const double row_max = logits.row(i).maxCoeff();
    const double log_sum =
        row_max + std::log((logits.row(i).array() - row_max).exp().sum());
    total += log_sum - logits(i, label);
  }
  return total / count;
}

Matrix cross_entropy_gradient(const Matrix& logits,
                              const std::vector<int>& labels,
                              const std::vector<char>& mask) {
  const int count = masked_count(mask);
  if (count == 0) throw ConfigError("cross_entropy_gradient: empty mask");
  Matrix grad = Matrix::Zero(logits.rows(), logits.cols());
  for (int i = 0; i < logits.rows(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    const double row_max = logits.row(i).maxCoeff();
    Eigen::RowVectorXd p = (logits.row(i).array() - row_max).exp();
    p /= p.sum();
    p(labels[static_cast<std::size_t>(i)]) -= 1.0;
    grad.row(i) = p / count;
  }
  return grad;
}

double evaluate(const SvdGcnModel& model, const NodeDataset& ds,
                const std::vector<char>& mask) {
  if (masked_count(mask) == 0) throw ConfigError("evaluate: empty mask");
  const Matrix logits = model_forward(model, ds.features);
  int correct = 0, total = 0;
  for (int i = 0; i < logits.rows(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    int arg = 0;
    for (int c = 1; c < logits.cols(); ++c) {
      if (logits(i, c) > logits(i, arg)) arg = c;  // ties keep the lower id
    }
    correct += arg == ds.labels[static_cast<std::size_t>(i)];
    total += 1;
  }
  return static_cast<double>(correct) / total;
}

Matrix inject_noise(const Matrix& x, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw ConfigError("noise sigma must be >= 0");
  if (sigma == 0.0) return x;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix noisy = x;
  for (int i = 0; i < noisy.rows(); ++i) {
    for (int j = 0; j < noisy.cols(); ++j) noisy(i, j) += sigma * gauss(rng);
  }
  return noisy;
}

SvdGcnModel build_model(const NodeDataset& ds, const TrainConfig& cfg) {
  SparseMatrix a_hat =
      normalized_adjacency_sparse(ds.graph, cfg.transpose_adjacency);
  std::shared_ptr<const FrameletOperators> ops;

  if (cfg.variant == ModelVariant::FrameletI ||
      cfg.variant == ModelVariant::FrameletII) {
    const Matrix dense =
        normalized_adjacency(ds.graph, cfg.transpose_adjacency);
    const SvdFactors svd = compute_svd(dense);
    const ModulationSet set = cfg.family == Family::Entropy
                                  ? ModulationSet::entropy(cfg.alpha)
                                  : ModulationSet::linear();
    FrameletConfig fc;
    fc.levels = cfg.levels;
    fc.scale = cfg.scale;
    fc.variant = BankVariant::Exact;
    fc.raw_scale = cfg.raw_scale;
    ops = std::make_shared<FrameletOperators>(
        build_exact_operators(svd, set, fc));
  } else if (cfg.variant == ModelVariant::FrameletIII) {
    const ModulationSet set = cfg.family == Family::Entropy
                                  ? ModulationSet::entropy(cfg.alpha)
                                  : ModulationSet::linear();
    const ChebFilter filter = cheb_fit_all(set, cfg.cheb_degree);
    FrameletConfig fc;
    fc.levels = cfg.levels;
    fc.scale = cfg.scale;
    fc.variant = BankVariant::Chebyshev;
    fc.cheb_degree = cfg.cheb_degree;
    fc.raw_scale = cfg.raw_scale;
    fc.dense_threshold = cfg.dense_threshold;
    ops = std::make_shared<FrameletOperators>(
        build_cheb_operators(a_hat, filter, fc));
  }

  return init_model(cfg.variant, std::move(ops), std::move(a_hat),
                    ds.feat_dim(), cfg.hidden, ds.num_classes, cfg.activation,
                    cfg.seed);
}

CheckpointMeta checkpoint_meta(const TrainConfig& cfg) {
  CheckpointMeta meta;
  meta.variant = cfg.variant;
  meta.activation = cfg.activation;
  meta.family = cfg.family;
  meta.alpha = cfg.alpha;
  meta.levels = cfg.levels;
  meta.scale = cfg.scale;
  meta.cheb_degree = cfg.cheb_degree;
  meta.raw_scale = cfg.raw_scale;
  meta.transpose_adjacency = cfg.transpose_adjacency;
  return meta;
}

namespace {

struct ParamSnapshot {
  std::vector<Vector> theta;
  Matrix weight;
  Matrix head_weight;
  Eigen::RowVectorXd head_bias;

  static ParamSnapshot take(const SvdGcnModel& model) {
    return {model.layer.theta, model.layer.weight, model.head.weight,
            model.head.bias};
  }
  void restore(SvdGcnModel& model) const {
    model.layer.theta = theta;
    model.layer.weight = weight;
    model.head.weight = head_weight;
    model.head.bias = head_bias;
  }
};

}  // namespace

TrainResult train(const NodeDataset& ds, const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) {
    throw ConfigError("dropout must lie in [0, 1)");
  }
  if (masked_count(ds.masks.train) == 0) {
    throw ConfigError("training mask is empty");
  }
  std::vector<char> seen(static_cast<std::size_t>(ds.num_classes), 0);
  for (std::size_t i = 0; i < ds.masks.train.size(); ++i) {
    if (ds.masks.train[i]) seen[static_cast<std::size_t>(ds.labels[i])] = 1;
  }
  for (int c = 0; c < ds.num_classes; ++c) {
    if (!seen[static_cast<std::size_t>(c)]) {
      throw ConfigError("class " + std::to_string(c) +
                        " is absent from the training mask");
    }
  }
  const bool has_val = masked_count(ds.masks.val) > 0;
  const bool has_test = masked_count(ds.masks.test) > 0;
  if (!has_val) {
    std::cerr << "[train] note: empty validation mask, keeping the last epoch"
              << std::endl;
  }

  TrainResult result;
  result.model = build_model(ds, cfg);
  AdamState adam = make_adam_state(result.model);
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  adam_cfg.weight_decay = cfg.weight_decay;

  // Dropout draws come from a stream separate from the init seed.
  std::mt19937_64 dropout_rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ParamSnapshot best = ParamSnapshot::take(result.model);
  result.best_epoch = 0;
  result.best_val_acc = -1.0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Matrix x = ds.features;
    if (cfg.dropout > 0.0) {
      const double keep = 1.0 - cfg.dropout;
      for (int i = 0; i < x.rows(); ++i) {
        for (int j = 0; j < x.cols(); ++j) {
          x(i, j) = unit(dropout_rng) < keep ? x(i, j) / keep : 0.0;
        }
      }
    }
    ForwardCache cache;
    const Matrix logits = model_forward(result.model, x, &cache);
    const double loss = cross_entropy(logits, ds.labels, ds.masks.train);
    const Matrix upstream =
        cross_entropy_gradient(logits, ds.labels, ds.masks.train);
    const Gradients grads = backward(result.model, x, cache, upstream);
    adam_step(adam, result.model, grads, adam_cfg);

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss;
    stats.val_acc = has_val ? evaluate(result.model, ds, ds.masks.val) : 0.0;
    stats.test_acc = has_test ? evaluate(result.model, ds, ds.masks.test) : 0.0;
    result.history.push_back(stats);

    if (stats.val_acc >= result.best_val_acc) {  // ties keep the latest
      result.best_val_acc = stats.val_acc;
      result.best_epoch = epoch;
      best = ParamSnapshot::take(result.model);
    }
  }

  best.restore(result.model);
  result.test_accuracy =
      has_test ? evaluate(result.model, ds, ds.masks.test) : 0.0;
  return result;
}

}  // namespace svdgcn
