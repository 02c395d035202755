#include "svdgcn/layers.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>

namespace svdgcn {

ModelVariant variant_from_string(const std::string& name) {
  if (name == "framelet1") return ModelVariant::FrameletI;
  if (name == "framelet2") return ModelVariant::FrameletII;
  if (name == "framelet3") return ModelVariant::FrameletIII;
  if (name == "plain") return ModelVariant::PlainConv;
  throw ConfigError("unknown variant '" + name +
                    "' (expected framelet1|framelet2|framelet3|plain)");
}

std::string variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::FrameletI: return "framelet1";
    case ModelVariant::FrameletII: return "framelet2";
    case ModelVariant::FrameletIII: return "framelet3";
    case ModelVariant::PlainConv: return "plain";
  }
  return "?";
}

namespace {

Matrix glorot_uniform(int rows, int cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

Matrix activate(const Matrix& z, Activation act) {
  if (act == Activation::Identity) return z;
  return z.cwiseMax(0.0);
}

Matrix activation_gradient(const Matrix& z, Activation act) {
  if (act == Activation::Identity) return Matrix::Ones(z.rows(), z.cols());
  return (z.array() > 0.0).cast<double>();
}

void check_model(const SvdGcnModel& model, const Matrix& x) {
  const bool uses_bank = model.variant != ModelVariant::PlainConv;
  if (uses_bank && !model.ops) {
    throw VariantError("model variant " + variant_name(model.variant) +
                       " needs an operator bank");
  }
  const int n = uses_bank ? model.ops->num_nodes()
                          : static_cast<int>(model.a_hat.rows());
  if (x.rows() != n) {
    throw DimensionError("input has " + std::to_string(x.rows()) +
                         " rows, graph has " + std::to_string(n) + " nodes");
  }
  if (x.cols() != model.layer.weight.rows()) {
    throw DimensionError("input has " + std::to_string(x.cols()) +
                         " features, weight expects " +
                         std::to_string(model.layer.weight.rows()));
  }
  if (uses_bank) {
    if (static_cast<int>(model.layer.theta.size()) != model.ops->band_count()) {
      throw DimensionError("theta count " +
                           std::to_string(model.layer.theta.size()) +
                           " != band count " +
                           std::to_string(model.ops->band_count()));
    }
    for (const Vector& t : model.layer.theta) {
      if (t.size() != n) throw DimensionError("theta length != node count");
    }
  }
  if (model.variant == ModelVariant::FrameletIII ||
      model.variant == ModelVariant::PlainConv) {
    if (model.a_hat.rows() != n || model.a_hat.cols() != n) {
      throw DimensionError("normalized adjacency missing or mis-sized");
    }
  }
}

}  // namespace

SvdGcnModel init_model(ModelVariant variant,
                       std::shared_ptr<const FrameletOperators> ops,
                       SparseMatrix a_hat, int input_dim, int hidden_dim,
                       int num_classes, Activation activation,
                       std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || num_classes < 1) {
    throw ConfigError("model dimensions must be positive");
  }
  if (variant != ModelVariant::PlainConv) {
    if (!ops) throw VariantError("framelet variants need an operator bank");
    if (variant == ModelVariant::FrameletI &&
        ops->variant() != BankVariant::Exact) {
      throw VariantError("framelet1 needs an exact bank");
    }
  }
  SvdGcnModel model;
  model.variant = variant;
  model.ops = std::move(ops);
  model.a_hat = std::move(a_hat);
  std::mt19937_64 rng(seed);
  model.layer.weight = glorot_uniform(input_dim, hidden_dim, rng);
  model.layer.activation = activation;
  model.head.weight = glorot_uniform(hidden_dim, num_classes, rng);
  model.head.bias = Eigen::RowVectorXd::Zero(num_classes);
  if (model.ops) {
    const int n = model.ops->num_nodes();
    model.layer.theta.assign(static_cast<std::size_t>(model.ops->band_count()),
                             Vector::Ones(n));
  }
  return model;
}

Matrix layer_forward(const SvdGcnModel& model, const Matrix& x,
                     ForwardCache* cache) {
  check_model(model, x);
  const Matrix xw = x * model.layer.weight;
  Matrix z;

  if (model.variant == ModelVariant::PlainConv) {
    z = model.a_hat * xw;
    if (cache) {
      cache->coeff.clear();
      cache->filtered.clear();
    }
  } else {
    const FrameletOperators& ops = *model.ops;
    if (model.variant == ModelVariant::FrameletI ||
        model.variant == ModelVariant::FrameletII) {
      // These reconstruct per band; the bank must carry the sqrt(lambda)
      // spectrum, which only the exact path does.
      if (ops.variant() != BankVariant::Exact) {
        throw VariantError(variant_name(model.variant) +
                           " needs an exact operator bank");
      }
    }
    std::vector<Matrix> coeff(static_cast<std::size_t>(ops.band_count()));
    std::vector<Matrix> filtered(coeff.size());
    Matrix sum = Matrix::Zero(x.rows(), xw.cols());
    for (int b = 0; b < ops.band_count(); ++b) {
      const auto bi = static_cast<std::size_t>(b);
      coeff[bi] = ops.apply_decomposition(b, xw);
      filtered[bi] =
          model.layer.theta[bi].asDiagonal() * coeff[bi];
      switch (model.variant) {
        case ModelVariant::FrameletI:
          sum += ops.apply_reconstruction(b, filtered[bi]);
          break;
        case ModelVariant::FrameletII:
          sum += ops.apply_decomposition(b, filtered[bi]);
          break;
        case ModelVariant::FrameletIII:
          sum += ops.apply_decomposition_transpose(b, filtered[bi]);
          break;
        case ModelVariant::PlainConv:
          break;
      }
    }
    z = model.variant == ModelVariant::FrameletIII ? Matrix(model.a_hat * sum)
                                                   : std::move(sum);
    if (cache) {
      cache->coeff = std::move(coeff);
      cache->filtered = std::move(filtered);
    }
  }

  Matrix y = activate(z, model.layer.activation);
  if (cache) {
    cache->xw = xw;
    cache->pre_activation = std::move(z);
    cache->hidden = y;
  }
  return y;
}

Matrix model_forward(const SvdGcnModel& model, const Matrix& x,
                     ForwardCache* cache) {
  const Matrix hidden = layer_forward(model, x, cache);
  Matrix logits = hidden * model.head.weight;
  logits.rowwise() += model.head.bias;
  if (cache) cache->logits = logits;
  return logits;
}

Gradients backward(const SvdGcnModel& model, const Matrix& x,
                   const ForwardCache& cache, const Matrix& upstream) {
  if (upstream.rows() != cache.hidden.rows() ||
      upstream.cols() != model.head.weight.cols()) {
    throw DimensionError("upstream gradient shape mismatch");
  }
  Gradients grads;
  grads.head_weight = cache.hidden.transpose() * upstream;
  grads.head_bias = upstream.colwise().sum();

  const Matrix d_hidden = upstream * model.head.weight.transpose();
  const Matrix d_z = d_hidden.cwiseProduct(
      activation_gradient(cache.pre_activation, model.layer.activation));

  Matrix d_xw;
  if (model.variant == ModelVariant::PlainConv) {
    d_xw = model.a_hat.transpose() * d_z;
  } else {
    const FrameletOperators& ops = *model.ops;
    // FrameletIII applies A after the band sum, so its gradient enters
    // every band through A^T.
    const Matrix d_band_sum = model.variant == ModelVariant::FrameletIII
                                  ? Matrix(model.a_hat.transpose() * d_z)
                                  : Matrix();
    d_xw = Matrix::Zero(cache.xw.rows(), cache.xw.cols());
    grads.theta.resize(static_cast<std::size_t>(ops.band_count()));
    for (int b = 0; b < ops.band_count(); ++b) {
      const auto bi = static_cast<std::size_t>(b);
      Matrix d_filtered;
      switch (model.variant) {
        case ModelVariant::FrameletI:
          d_filtered = ops.reconstruction_matrix(b).transpose() * d_z;
          break;
        case ModelVariant::FrameletII:
          d_filtered = ops.apply_decomposition_transpose(b, d_z);
          break;
        case ModelVariant::FrameletIII:
          d_filtered = ops.apply_decomposition(b, d_band_sum);
          break;
        case ModelVariant::PlainConv:
          break;
      }
      grads.theta[bi] =
          d_filtered.cwiseProduct(cache.coeff[bi]).rowwise().sum();
      const Matrix d_coeff =
          model.layer.theta[bi].asDiagonal() * d_filtered;
      d_xw += ops.apply_decomposition_transpose(b, d_coeff);
    }
  }
  grads.weight = x.transpose() * d_xw;
  return grads;
}

namespace {

constexpr char kCheckpointMagic[8] = {'S', 'V', 'D', 'G', 'C', 'K', '0', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("checkpoint truncated");
  return value;
}

void write_matrix(std::ofstream& out, const Matrix& m) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      row_major = m;
  out.write(reinterpret_cast<const char*>(row_major.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

Matrix read_matrix(std::ifstream& in, int rows, int cols) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(
      rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!in) throw IoError("checkpoint truncated");
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const SvdGcnModel& model,
                     const CheckpointMeta& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_pod(out, static_cast<std::int32_t>(meta.variant));
  write_pod(out, static_cast<std::int32_t>(meta.activation));
  write_pod(out, static_cast<std::int32_t>(meta.family));
  write_pod(out, meta.alpha);
  write_pod(out, static_cast<std::int32_t>(meta.levels));
  write_pod(out, meta.scale);
  write_pod(out, static_cast<std::int32_t>(meta.cheb_degree));
  write_pod(out, static_cast<std::uint8_t>(meta.raw_scale));
  write_pod(out, static_cast<std::uint8_t>(meta.transpose_adjacency));
  const std::int64_t n =
      model.layer.theta.empty() ? 0 : model.layer.theta.front().size();
  write_pod(out, n);
  write_pod(out, static_cast<std::int32_t>(model.layer.theta.size()));
  write_pod(out, static_cast<std::int64_t>(model.layer.weight.rows()));
  write_pod(out, static_cast<std::int64_t>(model.layer.weight.cols()));
  write_pod(out, static_cast<std::int64_t>(model.head.weight.cols()));
  for (const Vector& t : model.layer.theta) {
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(sizeof(double) * t.size()));
  }
  write_matrix(out, model.layer.weight);
  write_matrix(out, model.head.weight);
  out.write(reinterpret_cast<const char*>(model.head.bias.data()),
            static_cast<std::streamsize>(sizeof(double) *
                                         model.head.bias.size()));
  if (!out) throw IoError("short write to checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw ParseError("'" + path + "' is not a checkpoint file");
  }
  Checkpoint ck;
  ck.meta.variant = static_cast<ModelVariant>(read_pod<std::int32_t>(in));
  ck.meta.activation = static_cast<Activation>(read_pod<std::int32_t>(in));
  ck.meta.family = static_cast<Family>(read_pod<std::int32_t>(in));
  ck.meta.alpha = read_pod<double>(in);
  ck.meta.levels = read_pod<std::int32_t>(in);
  ck.meta.scale = read_pod<double>(in);
  ck.meta.cheb_degree = read_pod<std::int32_t>(in);
  ck.meta.raw_scale = read_pod<std::uint8_t>(in) != 0;
  ck.meta.transpose_adjacency = read_pod<std::uint8_t>(in) != 0;
  const auto n = read_pod<std::int64_t>(in);
  const auto bands = read_pod<std::int32_t>(in);
  const auto d_in = read_pod<std::int64_t>(in);
  const auto d_out = read_pod<std::int64_t>(in);
  const auto classes = read_pod<std::int64_t>(in);
  if (n < 0 || bands < 0 || d_in <= 0 || d_out <= 0 || classes <= 0) {
    throw ParseError("checkpoint '" + path + "' has invalid header");
  }
  ck.layer.activation = ck.meta.activation;
  ck.layer.theta.resize(static_cast<std::size_t>(bands));
  for (auto& t : ck.layer.theta) {
    t.resize(n);
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(sizeof(double) * n));
    if (!in) throw IoError("checkpoint truncated");
  }
  ck.layer.weight = read_matrix(in, static_cast<int>(d_in),
                                static_cast<int>(d_out));
  ck.head.weight = read_matrix(in, static_cast<int>(d_out),
                               static_cast<int>(classes));
  ck.head.bias.resize(classes);
  in.read(reinterpret_cast<char*>(ck.head.bias.data()),
          static_cast<std::streamsize>(sizeof(double) * classes));
  if (!in) throw IoError("checkpoint truncated");
  return ck;
}

}  // namespace svdgcn
