#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "pmcmc/diagnostics.hpp"
#include "pmcmc/rng.hpp"

using namespace pmcmc;

namespace {
std::vector<double> white_noise(int n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.gaussian();
  return x;
}

std::vector<double> ar1(int n, double coef, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> x(n);
  double v = rng.gaussian(0.0, 1.0 / std::sqrt(1.0 - coef * coef));
  for (int t = 0; t < n; ++t) {
    v = coef * v + rng.gaussian();
    x[t] = v;
  }
  return x;
}
}  // namespace

TEST_CASE("autocorrelation basics") {
  auto x = white_noise(100000, 1);
  AcfResult acf = autocorrelation(x, 100);
  CHECK(acf.rho[0] == 1.0);
  CHECK_FALSE(acf.zero_variance);
  int outside = 0;
  for (int l = 1; l <= 100; ++l)
    if (std::abs(acf.rho[l]) >= 3.0 / std::sqrt(100000.0)) ++outside;
  CHECK(outside <= 1);  // 99% of lags inside the band
}

TEST_CASE("autocorrelation of an AR(1) series decays geometrically") {
  auto x = ar1(1000000, 0.9, 2);
  AcfResult acf = autocorrelation(x, 10);
  for (int l = 1; l <= 10; ++l)
    CHECK(acf.rho[l] == doctest::Approx(std::pow(0.9, l)).epsilon(0.025));
}

TEST_CASE("degenerate series are flagged") {
  std::vector<double> constant(100, 3.14);
  AcfResult acf = autocorrelation(constant, 10);
  CHECK(acf.zero_variance);
  IfResult r = inefficiency_factor(constant);
  CHECK(r.zero_variance);
  CHECK_THROWS_AS(autocorrelation({1.0, 2.0}, 10), std::invalid_argument);
}

TEST_CASE("inefficiency factor of white noise is near one") {
  auto x = white_noise(100000, 3);
  IfResult ad = inefficiency_factor(x, {.adapted = true});
  IfResult fx = inefficiency_factor(x, {.adapted = false, .fixed_lag = 1000});
  CHECK(std::abs(ad.value - 1.0) < 0.1);
  CHECK(ad.lag_used >= 1);
  // both truncation rules agree on an uncorrelated series
  CHECK(std::abs(ad.value - fx.value) < 0.1 * std::max(ad.value, fx.value) + 0.1);
}

TEST_CASE("inefficiency factor of a persistent AR(1) series") {
  // 1 + 2 sum rho_l = (1 + c) / (1 - c) = 19 at c = 0.9
  auto x = ar1(1000000, 0.9, 4);
  IfResult ad = inefficiency_factor(x, {.adapted = true});
  CHECK(ad.value == doctest::Approx(19.0).epsilon(0.15));
}

TEST_CASE("posterior summary moments and quantiles") {
  SUBCASE("constant trace") {
    std::vector<std::vector<double>> trace = {std::vector<double>(50, 2.5)};
    PosteriorSummary s = posterior_summary(trace, 9);
    CHECK(s.n == 40);
    CHECK(s.params[0].mean == 2.5);
    CHECK(s.params[0].sd == 0.0);
    CHECK(s.params[0].q500 == 2.5);
  }
  SUBCASE("empty window is an error") {
    std::vector<std::vector<double>> trace = {std::vector<double>(10, 1.0)};
    CHECK_THROWS_AS(posterior_summary(trace, 9), std::invalid_argument);
    CHECK_THROWS_AS(posterior_summary(trace, 20), std::invalid_argument);
  }
  SUBCASE("mean equals the arithmetic mean of the window") {
    RngStream rng(5);
    std::vector<double> x(100001);
    for (auto& v : x) v = rng.gaussian(2.0, 3.0);
    PosteriorSummary s = posterior_summary({x}, 0);
    long double acc = 0.0L;
    for (size_t i = 1; i < x.size(); ++i) acc += x[i];
    double direct = static_cast<double>(acc / (x.size() - 1));
    CHECK(std::abs(s.params[0].mean - direct) < 1e-12);
  }
  SUBCASE("gaussian sample summary") {
    RngStream rng(6);
    std::vector<double> x(200001);
    for (auto& v : x) v = rng.gaussian(1.0, 2.0);
    PosteriorSummary s = posterior_summary({x}, 0, {"a"});
    const auto& p = s.params[0];
    CHECK(p.name == "a");
    CHECK(p.mean == doctest::Approx(1.0).epsilon(0.02));
    CHECK(p.sd == doctest::Approx(2.0).epsilon(0.02));
    CHECK(p.q025 == doctest::Approx(1.0 - 1.959964 * 2.0).epsilon(0.03));
    CHECK(p.q975 == doctest::Approx(1.0 + 1.959964 * 2.0).epsilon(0.03));
    // histogram holds every sample
    CHECK(std::accumulate(p.hist_count.begin(), p.hist_count.end(), 0.0) ==
          doctest::Approx(static_cast<double>(s.n)));
    REQUIRE(p.hist_edges.size() == 65);
    // the kernel density estimate integrates to about one
    REQUIRE(p.kde_x.size() == 256);
    double dx = p.kde_x[1] - p.kde_x[0];
    double mass = 0.0;
    for (double d : p.kde_density) mass += d * dx;
    CHECK(mass == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("mixing report bundles the per-parameter diagnostics") {
  auto a = ar1(20000, 0.5, 7);
  auto b = white_noise(20000, 8);
  MixingReport rep = mixing_report({a, b}, 0.44, 999, 50, {"slow", "fast"});
  REQUIRE(rep.param_names.size() == 2);
  CHECK(rep.acceptance == 0.44);
  CHECK(rep.if_adapted[0] > rep.if_adapted[1]);
  CHECK(rep.acf[0][1] > rep.acf[1][1]);
  CHECK(rep.summary.n == 19000);
}

TEST_CASE("tolerance sweep summary statistics") {
  SweepCell cell;
  cell.quantity = "loglik";
  cell.epsilon = 0.1;
  cell.particles = 100;
  cell.abs_errors = {std::exp(1.0), std::exp(2.0), std::exp(3.0)};
  auto rows = epsilon_sweep_report({cell});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].median_log_l1 == doctest::Approx(2.0));
  CHECK(rows[0].min_log_l1 == doctest::Approx(1.0));
  CHECK(rows[0].max_log_l1 == doctest::Approx(3.0));
  CHECK_THROWS_AS(epsilon_sweep_report({SweepCell{}}), std::invalid_argument);
}
