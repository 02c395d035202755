#include "svdgcn/operators.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <numbers>

namespace svdgcn {

namespace {

constexpr double kPi = std::numbers::pi;
// Tolerated relative overshoot of the spectral argument past the domain cap
// when the base exponent is supplied explicitly.
constexpr double kDomainSlack = 1.0 + 1e-9;

void validate_config(const FrameletConfig& cfg) {
  if (cfg.levels < 0) throw ConfigError("levels (L) must be >= 0");
  if (!(cfg.scale > 1.0)) throw ConfigError("scale (s) must be > 1");
  if (cfg.cheb_degree < 1) throw ConfigError("cheb degree must be >= 1");
}

/// Resolves m for a spectral bound (lambda_max, or its square on the
/// Chebyshev path) or validates a user-supplied value.
int resolve_or_check_exponent(const FrameletConfig& cfg, double bound) {
  if (cfg.raw_scale) {
    if (bound > kPi * kDomainSlack) {
      throw ConfigError("raw-scale spectral argument " + std::to_string(bound) +
                        " exceeds the modulation domain cap pi");
    }
    return 0;
  }
  if (cfg.base_exponent == kAutoExponent) {
    return resolve_base_exponent(bound, cfg.scale, kPi);
  }
  if (cfg.base_exponent < 0) {
    throw ConfigError("base exponent (m) must be >= 0");
  }
  if (bound / std::pow(cfg.scale, cfg.base_exponent) > kPi * kDomainSlack) {
    throw ConfigError("spectral argument " + std::to_string(bound) + " / s^" +
                      std::to_string(cfg.base_exponent) +
                      " exceeds the modulation domain cap pi");
  }
  return cfg.base_exponent;
}

using Factors = std::vector<std::pair<int, double>>;

/// Cascade factors for one band, innermost scale first:
///   (0, L):   g_0 at s^m, ..., g_0 at s^(m+L)
///   (k, ell): g_0 at s^m, ..., g_0 at s^(m+ell-1), g_k at s^(m+ell)
Factors band_factors(const BandId& id, int m, double s, bool raw) {
  Factors f;
  const auto divisor = [&](int j) { return raw ? 1.0 : std::pow(s, m + j); };
  if (id.k == 0) {
    for (int j = 0; j <= id.ell; ++j) f.emplace_back(0, divisor(j));
  } else {
    for (int j = 0; j < id.ell; ++j) f.emplace_back(0, divisor(j));
    f.emplace_back(id.k, divisor(id.ell));
  }
  return f;
}

std::vector<BandId> band_layout(int num_high, int levels) {
  std::vector<BandId> ids;
  ids.push_back({0, levels});
  for (int ell = 0; ell <= levels; ++ell) {
    for (int k = 1; k <= num_high; ++k) ids.push_back({k, ell});
  }
  return ids;
}

double power_iteration(const std::function<Vector(const Vector&)>& apply,
                       int n, int max_iters, double rel_tol) {
  Vector v = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double estimate = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = apply(v);
    const double rayleigh = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;  // v spans the null space; top value is 0
    if (it > 0 &&
        std::abs(rayleigh - estimate) <=
            rel_tol * std::max(std::abs(rayleigh), 1e-300)) {
      return rayleigh;
    }
    estimate = rayleigh;
    v = w / norm;
  }
  throw NumericError("power iteration did not converge within " +
                     std::to_string(max_iters) + " iterations");
}

/// y = (2 / (pi * divisor)) * gram * x - x, the Chebyshev variable mapped
/// from [0, pi * divisor] onto [-1, 1].
Matrix mapped_gram_apply(const SparseMatrix& gram, double divisor,
                         const Matrix& x) {
  Matrix y = gram * x;
  y *= 2.0 / (kPi * divisor);
  y -= x;
  return y;
}

Matrix cheb_band_apply(const ChebBand& band, const SparseMatrix& gram,
                       double divisor, const Matrix& x) {
  const auto& c = band.coeffs;
  Matrix p0 = x;
  Matrix acc = c[0] * p0;
  if (c.size() == 1) return acc;
  Matrix p1 = mapped_gram_apply(gram, divisor, x);
  acc += c[1] * p1;
  for (std::size_t i = 2; i < c.size(); ++i) {
    Matrix p2 = 2.0 * mapped_gram_apply(gram, divisor, p1) - p0;
    acc += c[i] * p2;
    p0 = std::move(p1);
    p1 = std::move(p2);
  }
  return acc;
}

Matrix cascade_apply(const Factors& factors, const ChebFilter& filter,
                     const SparseMatrix& gram, Matrix x) {
  for (const auto& [k, divisor] : factors) {
    x = cheb_band_apply(filter.bands[static_cast<std::size_t>(k)], gram,
                        divisor, x);
  }
  return x;
}

}  // namespace

int resolve_base_exponent(double lambda_max, double s, double domain_cap) {
  if (lambda_max < 0 || !std::isfinite(lambda_max)) {
    throw ConfigError("lambda_max must be finite and >= 0");
  }
  if (!(s > 1.0)) throw ConfigError("scale (s) must be > 1");
  int m = 0;
  double arg = lambda_max;
  while (arg > domain_cap) {
    arg /= s;
    ++m;
  }
  return m;
}

const FrameletOperators::Band& FrameletOperators::band(int b) const {
  if (b < 0 || b >= band_count()) {
    throw ConfigError("band index " + std::to_string(b) + " out of range");
  }
  return bands_[static_cast<std::size_t>(b)];
}

const Matrix& FrameletOperators::decomposition_matrix(int b) const {
  const Band& bd = band(b);
  if (!dense_) {
    throw VariantError("bank is implicit; dense matrices are not materialized");
  }
  return bd.w;
}

const Matrix& FrameletOperators::reconstruction_matrix(int b) const {
  const Band& bd = band(b);
  if (!has_recon_) {
    throw VariantError("bank has no reconstruction operators");
  }
  return bd.recon;
}

Matrix FrameletOperators::apply_decomposition(int b, const Matrix& x) const {
  const Band& bd = band(b);
  if (x.rows() != n_) {
    throw DimensionError("apply_decomposition: " + std::to_string(x.rows()) +
                         " rows vs " + std::to_string(n_) + " nodes");
  }
  if (dense_) return bd.w * x;
  return cascade_apply(bd.factors, filter_, gram_, x);
}

Matrix FrameletOperators::apply_decomposition_transpose(int b,
                                                        const Matrix& x) const {
  const Band& bd = band(b);
  if (x.rows() != n_) {
    throw DimensionError("apply_decomposition_transpose: " +
                         std::to_string(x.rows()) + " rows vs " +
                         std::to_string(n_) + " nodes");
  }
  if (dense_) return bd.w.transpose() * x;
  return cascade_apply(bd.factors, filter_, gram_, x);
}

Matrix FrameletOperators::apply_reconstruction(int b, const Matrix& x) const {
  const Band& bd = band(b);
  if (!has_recon_) {
    throw VariantError("bank has no reconstruction operators");
  }
  if (x.rows() != n_) {
    throw DimensionError("apply_reconstruction: " + std::to_string(x.rows()) +
                         " rows vs " + std::to_string(n_) + " nodes");
  }
  return bd.recon * x;
}

FrameletOperators FrameletOperators::build_svd_bank(const SvdFactors& svd,
                                                    const ModulationSet& set,
                                                    const FrameletConfig& cfg,
                                                    bool use_squared_spectrum) {
  validate_config(cfg);
  const int n = svd.size();
  if (n == 0) throw DimensionError("empty SVD factors");
  const double lambda_max = svd.lambda.maxCoeff();
  const double bound =
      use_squared_spectrum ? lambda_max * lambda_max : lambda_max;

  FrameletOperators ops;
  ops.cfg_ = cfg;
  ops.variant_ = BankVariant::Exact;
  ops.n_ = n;
  ops.high_bands_ = set.high_bands();
  ops.exponent_ = resolve_or_check_exponent(cfg, bound);
  ops.spectral_bound_ = bound;
  ops.dense_ = true;
  ops.has_recon_ = !use_squared_spectrum;

  const Matrix vt = svd.V.transpose();
  for (const BandId& id : band_layout(set.high_bands(), cfg.levels)) {
    FrameletOperators::Band band;
    band.id = id;
    band.factors = band_factors(id, ops.exponent_, cfg.scale, cfg.raw_scale);
    Vector diag(n);
    for (int i = 0; i < n; ++i) {
      const double lam = svd.lambda[i];
      double value = use_squared_spectrum ? 1.0 : std::sqrt(lam);
      for (const auto& [k, divisor] : band.factors) {
        const double arg = (use_squared_spectrum ? lam * lam : lam) / divisor;
        value *= set.eval(k, arg);
      }
      diag[i] = value;
    }
    band.w = svd.V * diag.asDiagonal() * vt;
    if (ops.has_recon_) band.recon = svd.U * diag.asDiagonal() * vt;
    ops.bands_.push_back(std::move(band));
  }
  return ops;
}

FrameletOperators build_exact_operators(const SvdFactors& svd,
                                        const ModulationSet& set,
                                        const FrameletConfig& cfg) {
  if (cfg.variant != BankVariant::Exact) {
    throw VariantError("build_exact_operators requires the Exact variant");
  }
  return FrameletOperators::build_svd_bank(svd, set, cfg,
                                           /*use_squared_spectrum=*/false);
}

FrameletOperators build_lambda2_reference(const SvdFactors& svd,
                                          const ModulationSet& set,
                                          const FrameletConfig& cfg) {
  return FrameletOperators::build_svd_bank(svd, set, cfg,
                                           /*use_squared_spectrum=*/true);
}

FrameletOperators build_cheb_operators(const SparseMatrix& a_hat,
                                       const ChebFilter& filter,
                                       const FrameletConfig& cfg) {
  if (cfg.variant != BankVariant::Chebyshev) {
    throw VariantError("build_cheb_operators requires the Chebyshev variant");
  }
  validate_config(cfg);
  if (a_hat.rows() != a_hat.cols()) {
    throw DimensionError("normalized adjacency must be square");
  }
  if (filter.band_count() < 2) {
    throw ConfigError("filter needs at least two bands");
  }
  const int n = static_cast<int>(a_hat.rows());

  FrameletOperators ops;
  ops.cfg_ = cfg;
  ops.variant_ = BankVariant::Chebyshev;
  ops.n_ = n;
  ops.high_bands_ = filter.band_count() - 1;
  ops.gram_ = (a_hat.transpose() * a_hat).pruned();
  ops.filter_ = filter;
  ops.spectral_bound_ = estimate_squared_spectral_norm(a_hat);
  ops.exponent_ = resolve_or_check_exponent(cfg, ops.spectral_bound_);
  ops.dense_ = n <= cfg.dense_threshold;
  ops.has_recon_ = false;

  for (const BandId& id : band_layout(ops.high_bands_, cfg.levels)) {
    FrameletOperators::Band band;
    band.id = id;
    band.factors = band_factors(id, ops.exponent_, cfg.scale, cfg.raw_scale);
    if (ops.dense_) {
      band.w = cascade_apply(band.factors, filter, ops.gram_,
                             Matrix::Identity(n, n));
    }
    ops.bands_.push_back(std::move(band));
  }
  return ops;
}

std::vector<Matrix> decompose(const FrameletOperators& ops, const Matrix& x) {
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(ops.band_count()));
  for (int b = 0; b < ops.band_count(); ++b) {
    blocks.push_back(ops.apply_decomposition(b, x));
  }
  return blocks;
}

Matrix reconstruct(const FrameletOperators& ops,
                   const std::vector<Matrix>& blocks) {
  if (static_cast<int>(blocks.size()) != ops.band_count()) {
    throw DimensionError("reconstruct: expected " +
                         std::to_string(ops.band_count()) + " blocks, got " +
                         std::to_string(blocks.size()));
  }
  Matrix sum;
  for (int b = 0; b < ops.band_count(); ++b) {
    Matrix term = ops.apply_reconstruction(b, blocks[static_cast<std::size_t>(b)]);
    if (b == 0) {
      sum = std::move(term);
    } else {
      if (term.rows() != sum.rows() || term.cols() != sum.cols()) {
        throw DimensionError("reconstruct: inconsistent block shapes");
      }
      sum += term;
    }
  }
  return sum;
}

double verify_theorem1(const FrameletOperators& ops, const Matrix& a_hat) {
  if (a_hat.rows() != ops.num_nodes() || a_hat.cols() != ops.num_nodes()) {
    throw DimensionError("verify_theorem1: shape mismatch");
  }
  Matrix sum = Matrix::Zero(ops.num_nodes(), ops.num_nodes());
  for (int b = 0; b < ops.band_count(); ++b) {
    sum += ops.reconstruction_matrix(b) * ops.decomposition_matrix(b);
  }
  const double denom = a_hat.norm();
  const double num = (sum - a_hat).norm();
  return denom > 0 ? num / denom : num;
}

double estimate_squared_spectral_norm(const SparseMatrix& a_hat, int max_iters,
                                      double rel_tol) {
  if (a_hat.rows() != a_hat.cols()) {
    throw DimensionError("spectral norm estimate needs a square matrix");
  }
  const SparseMatrix a_t = a_hat.transpose();
  return power_iteration(
      [&](const Vector& v) -> Vector { return a_t * (a_hat * v); },
      static_cast<int>(a_hat.rows()), max_iters, rel_tol);
}

Vector framelet_atom(const SvdFactors& svd, const ModulationSet& set,
                     const FrameletConfig& cfg, AtomKind kind, int k, int ell,
                     int node) {
  const int n = svd.size();
  if (node < 0 || node >= n) {
    throw ConfigError("atom node " + std::to_string(node) + " out of range");
  }
  if (ell < 0 || ell > cfg.levels) {
    throw ConfigError("atom level " + std::to_string(ell) + " out of range");
  }
  const bool low = kind == AtomKind::ForwardLow || kind == AtomKind::BackwardLow;
  if (low && k != 0) {
    throw ConfigError("low-pass atoms use band 0");
  }
  if (!low && (k < 1 || k > set.high_bands())) {
    throw ConfigError("high-pass atom band " + std::to_string(k) +
                      " out of range [1, " + std::to_string(set.high_bands()) +
                      "]");
  }
  const double divisor = std::pow(cfg.scale, ell);
  Vector diag(n);
  for (int i = 0; i < n; ++i) {
    diag[i] = std::sqrt(svd.lambda[i]) * set.eval(k, svd.lambda[i] / divisor);
  }
  // The translated-atom vector over all nodes q.
  switch (kind) {
    case AtomKind::ForwardLow:
      return svd.U * diag.cwiseProduct(svd.U.row(node).transpose());
    case AtomKind::ForwardHigh:
      return svd.V * diag.cwiseProduct(svd.V.row(node).transpose());
    case AtomKind::BackwardLow:
    case AtomKind::BackwardHigh:
      return svd.V * diag.cwiseProduct(svd.U.row(node).transpose());
  }
  throw ConfigError("unknown atom kind");
}

namespace {

constexpr char kBankMagic[8] = {'S', 'V', 'D', 'G', 'W', 'B', '0', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("bank file truncated");
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
  if (!in) throw IoError("bank file truncated");
  return m;
}

}  // namespace

void save_bank(const FrameletOperators& ops, const std::string& path) {
  if (!ops.is_dense()) {
    throw VariantError("cannot dump an implicit bank");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write bank '" + path + "'");
  out.write(kBankMagic, sizeof(kBankMagic));
  const FrameletConfig& cfg = ops.config();
  write_pod(out, static_cast<std::int32_t>(ops.variant()));
  write_pod(out, static_cast<std::int32_t>(ops.high_bands()));
  write_pod(out, static_cast<std::int32_t>(cfg.levels));
  write_pod(out, cfg.scale);
  write_pod(out, static_cast<std::int32_t>(ops.base_exponent()));
  write_pod(out, static_cast<std::uint8_t>(cfg.raw_scale));
  write_pod(out, static_cast<std::int32_t>(cfg.cheb_degree));
  write_pod(out, ops.spectral_bound());
  write_pod(out, static_cast<std::int64_t>(ops.num_nodes()));
  write_pod(out, static_cast<std::int32_t>(ops.band_count()));
  bool has_recon = true;
  try {
    ops.reconstruction_matrix(0);
  } catch (const VariantError&) {
    has_recon = false;
  }
  write_pod(out, static_cast<std::uint8_t>(has_recon));
  for (int b = 0; b < ops.band_count(); ++b) {
    const BandId id = ops.band_id(b);
    write_pod(out, static_cast<std::int32_t>(id.k));
    write_pod(out, static_cast<std::int32_t>(id.ell));
    write_matrix(out, ops.decomposition_matrix(b));
    if (has_recon) write_matrix(out, ops.reconstruction_matrix(b));
  }
  if (!out) throw IoError("short write to bank '" + path + "'");
}

FrameletOperators load_bank(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open bank '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kBankMagic, sizeof(magic)) != 0) {
    throw ParseError("'" + path + "' is not a bank file");
  }
  FrameletOperators ops;
  ops.variant_ = static_cast<BankVariant>(read_pod<std::int32_t>(in));
  ops.high_bands_ = read_pod<std::int32_t>(in);
  ops.cfg_.levels = read_pod<std::int32_t>(in);
  ops.cfg_.scale = read_pod<double>(in);
  ops.exponent_ = read_pod<std::int32_t>(in);
  ops.cfg_.base_exponent = ops.exponent_;
  ops.cfg_.raw_scale = read_pod<std::uint8_t>(in) != 0;
  ops.cfg_.cheb_degree = read_pod<std::int32_t>(in);
  ops.cfg_.variant = ops.variant_;
  ops.spectral_bound_ = read_pod<double>(in);
  ops.n_ = static_cast<int>(read_pod<std::int64_t>(in));
  const int band_count = read_pod<std::int32_t>(in);
  ops.has_recon_ = read_pod<std::uint8_t>(in) != 0;
  ops.dense_ = true;
  if (ops.n_ <= 0 || band_count <= 0) {
    throw ParseError("bank '" + path + "' has invalid header");
  }
  for (int b = 0; b < band_count; ++b) {
    FrameletOperators::Band band;
    band.id.k = read_pod<std::int32_t>(in);
    band.id.ell = read_pod<std::int32_t>(in);
    band.factors = band_factors(band.id, ops.exponent_, ops.cfg_.scale,
                                ops.cfg_.raw_scale);
    band.w = read_matrix(in, ops.n_, ops.n_);
    if (ops.has_recon_) band.recon = read_matrix(in, ops.n_, ops.n_);
    ops.bands_.push_back(std::move(band));
  }
  return ops;
}

}  // namespace svdgcn
