#pragma once

#include "svdgcn/common.hpp"
#include "svdgcn/framelet.hpp"
#include "svdgcn/spectral.hpp"

#include <memory>
#include <string>
#include <vector>

namespace svdgcn {

enum class BankVariant { Exact, Chebyshev };

/// Sentinel for "pick the base exponent automatically".
inline constexpr int kAutoExponent = -1;

struct FrameletConfig {
  int levels = 0;                     // L
  double scale = 2.0;                 // s, dilation base (> 1)
  int base_exponent = kAutoExponent;  // m
  BankVariant variant = BankVariant::Exact;
  int cheb_degree = 10;
  /// Drop the (s, m) dilation and feed the spectrum to the modulation
  /// functions unscaled, the literal one-scale filtering form.
  bool raw_scale = false;
  /// Chebyshev banks with more nodes than this stay implicit (applied
  /// through the recurrence) instead of being materialized densely.
  int dense_threshold = 4096;
};

struct BandId {
  int k = 0;
  int ell = 0;

  friend bool operator==(const BandId&, const BandId&) = default;
};

/// Smallest integer m >= 0 with lambda_max / s^m <= domain_cap.
int resolve_base_exponent(double lambda_max, double s, double domain_cap);

/// Stacked decomposition operators W_b (and, on the exact path, the matching
/// reconstruction operators R_b), one per band. Band order follows the
/// stacking (0, L), then (k, ell) for ell = 0..L, k = 1..K.
///
/// Exact path: W_b = V diag(prod_g(lambda) * sqrt(lambda)) V^T and
/// R_b = U diag(same) V^T, so that sum_b R_b W_b equals the normalized
/// adjacency. Chebyshev path: W_b is a product of Chebyshev matrix
/// polynomials in A^T A (spectrum lambda^2, no sqrt factor) and needs no
/// SVD; above the dense threshold it is kept as an implicit linear map.
///
/// Banks are immutable after construction and safe to share across threads.
class FrameletOperators {
 public:
  int num_nodes() const { return n_; }
  int band_count() const { return static_cast<int>(bands_.size()); }
  int high_bands() const { return high_bands_; }  // K
  BandId band_id(int b) const { return band(b).id; }
  BankVariant variant() const { return variant_; }
  const FrameletConfig& config() const { return cfg_; }
  int base_exponent() const { return exponent_; }  // resolved m
  /// Largest spectral argument before scaling: lambda_max on the exact
  /// path, the lambda_max^2 power-iteration estimate on the Chebyshev path.
  double spectral_bound() const { return spectral_bound_; }
  bool is_dense() const { return dense_; }

  const Matrix& decomposition_matrix(int b) const;
  const Matrix& reconstruction_matrix(int b) const;

  /// W_b * x; works for dense and implicit banks alike.
  Matrix apply_decomposition(int b, const Matrix& x) const;
  /// W_b^T * x. Chebyshev bands are symmetric by construction, so the
  /// implicit path reuses the forward application.
  Matrix apply_decomposition_transpose(int b, const Matrix& x) const;
  /// R_b * x (exact banks only).
  Matrix apply_reconstruction(int b, const Matrix& x) const;

 private:
  struct Band {
    BandId id;
    // Cascade factors in application order (innermost first): band index
    // into the modulation set / filter, and the scale divisor s^(m+j).
    std::vector<std::pair<int, double>> factors;
    Matrix w;      // dense decomposition matrix (empty when implicit)
    Matrix recon;  // dense reconstruction matrix (exact variant only)
  };

  const Band& band(int b) const;

  /// Shared scaffolding for both SVD-route banks; `use_squared_spectrum`
  /// selects lambda^2 arguments and drops the sqrt(lambda) factor.
  static FrameletOperators build_svd_bank(const SvdFactors& svd,
                                          const ModulationSet& set,
                                          const FrameletConfig& cfg,
                                          bool use_squared_spectrum);

  FrameletConfig cfg_;
  BankVariant variant_ = BankVariant::Exact;
  int n_ = 0;
  int high_bands_ = 0;
  int exponent_ = 0;
  double spectral_bound_ = 0.0;
  bool dense_ = true;
  bool has_recon_ = false;
  std::vector<Band> bands_;

  // Implicit Chebyshev state: A^T A and the fitted polynomials.
  SparseMatrix gram_;
  ChebFilter filter_;

  friend FrameletOperators build_exact_operators(const SvdFactors&,
                                                 const ModulationSet&,
                                                 const FrameletConfig&);
  friend FrameletOperators build_lambda2_reference(const SvdFactors&,
                                                   const ModulationSet&,
                                                   const FrameletConfig&);
  friend FrameletOperators build_cheb_operators(const SparseMatrix&,
                                                const ChebFilter&,
                                                const FrameletConfig&);
  friend FrameletOperators load_bank(const std::string&);
};

/// Exact bank from a precomputed SVD (variant must be Exact).
FrameletOperators build_exact_operators(const SvdFactors& svd,
                                        const ModulationSet& set,
                                        const FrameletConfig& cfg);

/// Exact bank on the squared spectrum (arguments lambda^2 / s^(m+j), no
/// sqrt(lambda) factor) — the SVD-route twin of the Chebyshev bank, used to
/// measure its fidelity. Decomposition-only.
FrameletOperators build_lambda2_reference(const SvdFactors& svd,
                                          const ModulationSet& set,
                                          const FrameletConfig& cfg);

/// Chebyshev bank from the normalized adjacency alone; never performs an
/// SVD. The base exponent is resolved against a power-iteration estimate of
/// lambda_max^2.
FrameletOperators build_cheb_operators(const SparseMatrix& a_hat,
                                       const ChebFilter& filter,
                                       const FrameletConfig& cfg);

/// One coefficient block W_b * x per band.
std::vector<Matrix> decompose(const FrameletOperators& ops, const Matrix& x);

/// sum_b R_b * block_b; composing with decompose multiplies by the
/// normalized adjacency. Exact banks only.
Matrix reconstruct(const FrameletOperators& ops,
                   const std::vector<Matrix>& blocks);

/// ||sum_b R_b W_b - a_hat||_F / ||a_hat||_F (exact banks only).
double verify_theorem1(const FrameletOperators& ops, const Matrix& a_hat);

/// Rayleigh-quotient power iteration on A^T A. Returns the top eigenvalue
/// (= squared top singular value of A); throws NumericError when the
/// relative change has not dropped below rel_tol within max_iters.
double estimate_squared_spectral_norm(const SparseMatrix& a_hat,
                                      int max_iters = 100,
                                      double rel_tol = 1e-8);

enum class AtomKind { ForwardLow, ForwardHigh, BackwardLow, BackwardHigh };

/// Single-scale framelet atom translated at `node`, evaluated at every
/// node, with the spectrum divided by scale^ell:
///   forward low   sum_i sqrt(l_i) g_0(l_i/s^ell) u_i(node) u_i(.)
///   forward high  sum_i sqrt(l_i) g_k(l_i/s^ell) v_i(node) v_i(.)
///   backward low/high   sum_i sqrt(l_i) g_k(l_i/s^ell) u_i(node) v_i(.)
/// Backward atoms are rows of the reconstruction operators; forward high
/// atoms are rows of the (symmetric) decomposition operators. The forward
/// low atom runs through U on both sides, which matches no bank operator —
/// an asymmetry kept as defined.
Vector framelet_atom(const SvdFactors& svd, const ModulationSet& set,
                     const FrameletConfig& cfg, AtomKind kind, int k, int ell,
                     int node);

/// Binary cache of a dense bank (band headers + row-major doubles).
void save_bank(const FrameletOperators& ops, const std::string& path);
FrameletOperators load_bank(const std::string& path);

}  // namespace svdgcn
