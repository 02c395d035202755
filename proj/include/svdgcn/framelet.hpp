#pragma once

#include "svdgcn/common.hpp"

#include <functional>
#include <string>
#include <vector>

namespace svdgcn {

enum class Family { Linear, Entropy, Custom };

Family family_from_string(const std::string& name);
std::string family_name(Family f);

/// A set of K+1 modulation functions g_0..g_K on [0, pi] whose squares sum
/// to one everywhere. g_0 shrinks the high end of the spectrum (it falls
/// from 1 to 0), g_K the low end.
///
/// Arguments outside [0, pi] clamp to the boundary; exponent resolution
/// keeps any overshoot at rounding scale.
class ModulationSet {
 public:
  using Fn = std::function<double(double)>;

  /// g0 = cos^2(xi/2), g1 = sin(xi)/sqrt(2), g2 = sin^2(xi/2).
  static ModulationSet linear();

  /// Entropy family with parameter alpha in (0, 1]:
  ///   g1 = sqrt(4*alpha*(xi/pi) - 4*alpha*(xi/pi)^2),
  ///   g0 = sqrt(1 - g1^2) on xi <= pi/2 and 0 past it,
  ///   g2 = the complementary branch on xi > pi/2.
  static ModulationSet entropy(double alpha);

  /// Arbitrary band functions, mainly for tests (broken sets, K != 2).
  static ModulationSet custom(std::vector<Fn> bands);

  int high_bands() const { return static_cast<int>(bands_.size()) - 1; }  // K
  int band_count() const { return static_cast<int>(bands_.size()); }      // K+1

  /// g_k(xi) with xi clamped to [0, pi]. Throws on a bad band index.
  double eval(int k, double xi) const;

  Family family() const { return family_; }
  double alpha() const { return alpha_; }

 private:
  ModulationSet(Family family, double alpha, std::vector<Fn> bands);

  Family family_;
  double alpha_;
  std::vector<Fn> bands_;
};

/// max over a uniform grid on [0, pi] of |sum_k g_k(xi)^2 - 1|.
double check_identity(const ModulationSet& set, int grid_size);

/// One fitted band: coefficients c_0..c_n of sum_i c_i T_i(t) with
/// t = 2*xi/pi - 1, interpolating the target at the n+1 Chebyshev nodes
/// t_j = cos(pi*(j + 1/2)/(n + 1)).
struct ChebBand {
  int degree = 0;
  std::vector<double> coeffs;
};

/// Chebyshev interpolants for every band of a modulation set.
struct ChebFilter {
  int degree = 0;
  std::vector<ChebBand> bands;

  int band_count() const { return static_cast<int>(bands.size()); }
};

ChebBand cheb_fit(const std::function<double(double)>& g, int degree);
ChebBand cheb_fit(const ModulationSet& set, int k, int degree);
ChebFilter cheb_fit_all(const ModulationSet& set, int degree);

/// Clenshaw evaluation of a fitted band at xi (clamped to [0, pi]).
double cheb_eval_scalar(const ChebBand& band, double xi);

/// max over a uniform grid of |fit(xi) - g_k(xi)|.
double cheb_fit_error(const ChebBand& band, const ModulationSet& set, int k,
                      int grid_size);

}  // namespace svdgcn
