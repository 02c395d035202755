#include "svdgcn/framelet.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace svdgcn;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("linear family closed-form values") {
  const ModulationSet set = ModulationSet::linear();
  CHECK(set.high_bands() == 2);
  SUBCASE("xi = pi/2") {
    CHECK(set.eval(0, kPi / 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(set.eval(1, kPi / 2) ==
          doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
    CHECK(set.eval(2, kPi / 2) == doctest::Approx(0.5).epsilon(1e-14));
    double sq = 0.0;
    for (int k = 0; k < 3; ++k) sq += set.eval(k, kPi / 2) * set.eval(k, kPi / 2);
    CHECK(sq == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("boundaries") {
    CHECK(set.eval(0, 0.0) == doctest::Approx(1.0));
    CHECK(set.eval(1, 0.0) == doctest::Approx(0.0));
    CHECK(set.eval(2, 0.0) == doctest::Approx(0.0));
    CHECK(set.eval(0, kPi) == doctest::Approx(0.0));
    CHECK(set.eval(2, kPi) == doctest::Approx(1.0));
  }
  SUBCASE("out-of-domain arguments clamp") {
    CHECK(set.eval(0, -1.0) == set.eval(0, 0.0));
    CHECK(set.eval(2, kPi + 0.5) == set.eval(2, kPi));
  }
  SUBCASE("bad band index") {
    CHECK_THROWS_AS(set.eval(3, 0.5), ConfigError);
    CHECK_THROWS_AS(set.eval(-1, 0.5), ConfigError);
  }
}

TEST_CASE("entropy family closed-form values") {
  SUBCASE("alpha = 1 peaks at pi/2") {
    const ModulationSet set = ModulationSet::entropy(1.0);
    CHECK(set.eval(1, kPi / 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(set.eval(0, kPi / 2) == doctest::Approx(0.0));
    CHECK(set.eval(2, kPi / 2) == doctest::Approx(0.0));
  }
  SUBCASE("alpha = 0.5 keeps the printed branch split") {
    const ModulationSet set = ModulationSet::entropy(0.5);
    // g0 owns xi <= pi/2, g2 owns xi > pi/2.
    CHECK(set.eval(0, kPi / 2) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK(set.eval(2, kPi / 2) == doctest::Approx(0.0));
    CHECK(set.eval(0, kPi / 2 + 1e-9) == doctest::Approx(0.0));
  }
  SUBCASE("alpha validation") {
    CHECK_THROWS_AS(ModulationSet::entropy(0.0), ConfigError);
    CHECK_THROWS_AS(ModulationSet::entropy(1.5), ConfigError);
  }
}

TEST_CASE("identity condition on the grid") {
  CHECK(check_identity(ModulationSet::linear(), 1001) <= 1e-12);
  for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    CHECK(check_identity(ModulationSet::entropy(alpha), 1001) <= 1e-12);
  }
}

TEST_CASE("a deliberately broken set fails the identity loudly") {
  const ModulationSet linear = ModulationSet::linear();
  const ModulationSet broken = ModulationSet::custom({
      [&](double xi) { return 0.8 * linear.eval(0, xi); },
      [&](double xi) { return linear.eval(1, xi); },
      [&](double xi) { return linear.eval(2, xi); },
  });
  CHECK(check_identity(broken, 1001) >= 0.1);
}

TEST_CASE("monotonicity of the boundary bands") {
  for (const ModulationSet& set :
       {ModulationSet::linear(), ModulationSet::entropy(0.5),
        ModulationSet::entropy(1.0)}) {
    double prev_g0 = set.eval(0, 0.0);
    double prev_gk = set.eval(set.high_bands(), 0.0);
    CHECK(prev_g0 == doctest::Approx(1.0));
    CHECK(prev_gk == doctest::Approx(0.0));
    for (int i = 1; i <= 1000; ++i) {
      const double xi = kPi * i / 1000;
      const double g0 = set.eval(0, xi);
      const double gk = set.eval(set.high_bands(), xi);
      CHECK(g0 <= prev_g0 + 1e-15);
      CHECK(gk >= prev_gk - 1e-15);
      prev_g0 = g0;
      prev_gk = gk;
    }
    CHECK(prev_g0 == doctest::Approx(0.0));
    CHECK(prev_gk == doctest::Approx(1.0));
  }
}

TEST_CASE("chebyshev fit of trivial functions") {
  SUBCASE("constant one") {
    const ChebBand band = cheb_fit([](double) { return 1.0; }, 6);
    CHECK(band.coeffs[0] == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 1; i < band.coeffs.size(); ++i) {
      CHECK(std::abs(band.coeffs[i]) <= 1e-14);
    }
    CHECK(cheb_eval_scalar(band, 0.7) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("affine map xi -> xi") {
    const ChebBand band = cheb_fit([](double xi) { return xi; }, 5);
    CHECK(band.coeffs[0] == doctest::Approx(kPi / 2).epsilon(1e-14));
    CHECK(band.coeffs[1] == doctest::Approx(kPi / 2).epsilon(1e-14));
    for (std::size_t i = 2; i < band.coeffs.size(); ++i) {
      CHECK(std::abs(band.coeffs[i]) <= 1e-13);
    }
    CHECK(cheb_eval_scalar(band, kPi) == doctest::Approx(kPi).epsilon(1e-14));
    CHECK(cheb_eval_scalar(band, 0.0) == doctest::Approx(0.0));
  }
}

TEST_CASE("fitted polynomial interpolates at the fit nodes") {
  for (const ModulationSet& set :
       {ModulationSet::linear(), ModulationSet::entropy(1.0)}) {
    const int n = set.family() == Family::Linear ? 10 : 16;
    for (int k = 0; k < set.band_count(); ++k) {
      const ChebBand band = cheb_fit(set, k, n);
      for (int j = 0; j <= n; ++j) {
        const double t = std::cos(kPi * (j + 0.5) / (n + 1));
        const double xi = kPi * (t + 1.0) / 2.0;
        CHECK(std::abs(cheb_eval_scalar(band, xi) - set.eval(k, xi)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("linear bands fit to 1e-6 at degree 10") {
  const ModulationSet set = ModulationSet::linear();
  for (int k = 0; k < 3; ++k) {
    const ChebBand band = cheb_fit(set, k, 10);
    CHECK(cheb_fit_error(band, set, k, 10001) <= 1e-6);
  }
}

TEST_CASE("cheb_eval matches the closed form for linear g1") {
  const ModulationSet set = ModulationSet::linear();
  const ChebBand band = cheb_fit(set, 1, 10);
  CHECK(std::abs(cheb_eval_scalar(band, 1.0) - set.eval(1, 1.0)) <= 1e-6);
}

TEST_CASE("linear fit error decays with degree") {
  const ModulationSet set = ModulationSet::linear();
  for (int k = 0; k < 3; ++k) {
    const double coarse = cheb_fit_error(cheb_fit(set, k, 6), set, k, 10001);
    const double fine = cheb_fit_error(cheb_fit(set, k, 12), set, k, 10001);
    CHECK(fine < coarse);
  }
}

TEST_CASE("entropy fit error decays with degree but is limited by kinks") {
  // The alpha = 1 bands are the friendliest entropy case: g0/g2 have a
  // corner at pi/2 and g1 square-root endpoints, so polynomial error decays
  // like 1/n. Pin the measured degree-16 errors as regression values.
  const ModulationSet set = ModulationSet::entropy(1.0);
  const double g0_err = cheb_fit_error(cheb_fit(set, 0, 16), set, 0, 10001);
  const double g1_err = cheb_fit_error(cheb_fit(set, 1, 16), set, 1, 10001);
  CHECK(g0_err == doctest::Approx(0.01760493).epsilon(1e-4));
  CHECK(g1_err == doctest::Approx(0.05882353).epsilon(1e-4));
  CHECK(cheb_fit_error(cheb_fit(set, 1, 64), set, 1, 10001) < g1_err);
}

TEST_CASE("fit rejects degree < 1") {
  CHECK_THROWS_AS(cheb_fit(ModulationSet::linear(), 0, 0), ConfigError);
}
