#pragma once

#include "svdgcn/common.hpp"
#include "svdgcn/operators.hpp"

#include <memory>
#include <string>
#include <vector>

namespace svdgcn {

enum class Activation { ReLU, Identity };

/// FrameletI reconstructs filtered coefficients through the dual operators,
/// FrameletII stays in the forward operator space, FrameletIII runs the
/// SVD-free squared-spectrum bands, PlainConv is the sigma(A X W) baseline.
enum class ModelVariant { FrameletI, FrameletII, FrameletIII, PlainConv };

ModelVariant variant_from_string(const std::string& name);
std::string variant_name(ModelVariant v);

struct LayerParams {
  std::vector<Vector> theta;  // one length-N spectral filter per band
  Matrix weight;              // d_in x d_out feature transform
  Activation activation = Activation::ReLU;
};

struct HeadParams {
  Matrix weight;            // d_out x classes
  Eigen::RowVectorXd bias;  // 1 x classes
};

/// One framelet convolution layer plus a linear classifier head. The
/// operator bank is shared read-only; parameters are owned here.
struct SvdGcnModel {
  ModelVariant variant = ModelVariant::FrameletI;
  LayerParams layer;
  HeadParams head;
  std::shared_ptr<const FrameletOperators> ops;  // null for PlainConv
  SparseMatrix a_hat;  // used by FrameletIII and PlainConv

  int input_dim() const { return static_cast<int>(layer.weight.rows()); }
  int hidden_dim() const { return static_cast<int>(layer.weight.cols()); }
  int num_classes() const { return static_cast<int>(head.weight.cols()); }
};

/// theta starts at all-ones so the untrained layer collapses to the plain
/// convolution; weight and head are Glorot-uniform, bias zero.
SvdGcnModel init_model(ModelVariant variant,
                       std::shared_ptr<const FrameletOperators> ops,
                       SparseMatrix a_hat, int input_dim, int hidden_dim,
                       int num_classes, Activation activation,
                       std::uint64_t seed);

/// Intermediates reused by the analytic backward pass.
struct ForwardCache {
  Matrix xw;                     // X * weight
  std::vector<Matrix> coeff;     // W_b X W per band
  std::vector<Matrix> filtered;  // theta_b o coeff_b
  Matrix pre_activation;
  Matrix hidden;
  Matrix logits;
};

/// The framelet layer alone: per band filter the coefficients with theta,
/// map back per the variant, sum, activate.
Matrix layer_forward(const SvdGcnModel& model, const Matrix& x,
                     ForwardCache* cache = nullptr);

/// Layer plus classifier head; returns logits.
Matrix model_forward(const SvdGcnModel& model, const Matrix& x,
                     ForwardCache* cache = nullptr);

struct Gradients {
  std::vector<Vector> theta;
  Matrix weight;
  Matrix head_weight;
  Eigen::RowVectorXd head_bias;
};

/// Analytic gradients of all parameters given d(loss)/d(logits). The
/// operator matrices are constants of the layer and receive no gradient.
Gradients backward(const SvdGcnModel& model, const Matrix& x,
                   const ForwardCache& cache, const Matrix& upstream);

/// Everything needed to rebuild the pipeline around saved parameters.
struct CheckpointMeta {
  ModelVariant variant = ModelVariant::FrameletI;
  Activation activation = Activation::ReLU;
  Family family = Family::Linear;
  double alpha = 1.0;
  int levels = 1;
  double scale = 1.5;
  int cheb_degree = 10;
  bool raw_scale = false;
  bool transpose_adjacency = false;
};

struct Checkpoint {
  CheckpointMeta meta;
  LayerParams layer;
  HeadParams head;
};

/// Plain binary: header (variant, shapes, framelet settings) followed by
/// the parameter tensors as row-major 8-byte floats.
void save_checkpoint(const std::string& path, const SvdGcnModel& model,
                     const CheckpointMeta& meta);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace svdgcn
