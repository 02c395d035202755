#include "svdgcn/framelet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace svdgcn {

namespace {
constexpr double kPi = std::numbers::pi;

double clamp_domain(double xi) { return std::clamp(xi, 0.0, kPi); }
}  // namespace

Family family_from_string(const std::string& name) {
  if (name == "linear") return Family::Linear;
  if (name == "entropy") return Family::Entropy;
  throw ConfigError("unknown framelet family '" + name +
                    "' (expected linear|entropy)");
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Linear: return "linear";
    case Family::Entropy: return "entropy";
    case Family::Custom: return "custom";
  }
  return "?";
}

ModulationSet::ModulationSet(Family family, double alpha, std::vector<Fn> bands)
    : family_(family), alpha_(alpha), bands_(std::move(bands)) {
  if (bands_.size() < 2) {
    throw ConfigError("a modulation set needs at least two bands");
  }
}

ModulationSet ModulationSet::linear() {
  std::vector<Fn> bands;
  bands.push_back([](double xi) { return std::pow(std::cos(xi / 2), 2); });
  bands.push_back([](double xi) { return std::sin(xi) / std::sqrt(2.0); });
  bands.push_back([](double xi) { return std::pow(std::sin(xi / 2), 2); });
  return ModulationSet(Family::Linear, 0.0, std::move(bands));
}

ModulationSet ModulationSet::entropy(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("entropy alpha must lie in (0, 1], got " +
                      std::to_string(alpha));
  }
  auto g1_sq = [alpha](double xi) {
    const double t = xi / kPi;
    return std::max(4.0 * alpha * t - 4.0 * alpha * t * t, 0.0);
  };
  std::vector<Fn> bands;
  bands.push_back([g1_sq](double xi) {
    return xi <= kPi / 2 ? std::sqrt(std::max(1.0 - g1_sq(xi), 0.0)) : 0.0;
  });
  bands.push_back([g1_sq](double xi) { return std::sqrt(g1_sq(xi)); });
  bands.push_back([g1_sq](double xi) {
    return xi > kPi / 2 ? std::sqrt(std::max(1.0 - g1_sq(xi), 0.0)) : 0.0;
  });
  return ModulationSet(Family::Entropy, alpha, std::move(bands));
}

ModulationSet ModulationSet::custom(std::vector<Fn> bands) {
  return ModulationSet(Family::Custom, 0.0, std::move(bands));
}

double ModulationSet::eval(int k, double xi) const {
  if (k < 0 || k >= band_count()) {
    throw ConfigError("band index " + std::to_string(k) +
                      " out of range [0, " + std::to_string(high_bands()) +
                      "]");
  }
  return bands_[static_cast<std::size_t>(k)](clamp_domain(xi));
}

double check_identity(const ModulationSet& set, int grid_size) {
  if (grid_size < 2) throw ConfigError("identity grid needs >= 2 points");
  double worst = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double xi = kPi * i / (grid_size - 1);
    double sum = 0.0;
    for (int k = 0; k < set.band_count(); ++k) {
      const double g = set.eval(k, xi);
      sum += g * g;
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

ChebBand cheb_fit(const std::function<double(double)>& g, int degree) {
  if (degree < 1) throw ConfigError("Chebyshev degree must be >= 1");
  const int n = degree;
  std::vector<double> node_values(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    const double t = std::cos(kPi * (j + 0.5) / (n + 1));
    node_values[static_cast<std::size_t>(j)] = g(kPi * (t + 1.0) / 2.0);
  }
  ChebBand band;
  band.degree = n;
  band.coeffs.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) {
      acc += node_values[static_cast<std::size_t>(j)] *
             std::cos(i * kPi * (j + 0.5) / (n + 1));
    }
    band.coeffs[static_cast<std::size_t>(i)] =
        (i == 0 ? 1.0 : 2.0) * acc / (n + 1);
  }
  return band;
}

ChebBand cheb_fit(const ModulationSet& set, int k, int degree) {
  return cheb_fit([&set, k](double xi) { return set.eval(k, xi); }, degree);
}

ChebFilter cheb_fit_all(const ModulationSet& set, int degree) {
  ChebFilter filter;
  filter.degree = degree;
  filter.bands.reserve(static_cast<std::size_t>(set.band_count()));
  for (int k = 0; k < set.band_count(); ++k) {
    filter.bands.push_back(cheb_fit(set, k, degree));
  }
  return filter;
}

double cheb_eval_scalar(const ChebBand& band, double xi) {
  const double t = 2.0 * clamp_domain(xi) / kPi - 1.0;
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t i = band.coeffs.size() - 1; i >= 1; --i) {
    const double b0 = 2.0 * t * b1 - b2 + band.coeffs[i];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + band.coeffs[0];
}

double cheb_fit_error(const ChebBand& band, const ModulationSet& set, int k,
                      int grid_size) {
  double worst = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double xi = kPi * i / (grid_size - 1);
    worst = std::max(worst, std::abs(cheb_eval_scalar(band, xi) - set.eval(k, xi)));
  }
  return worst;
}

}  // namespace svdgcn
