#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "pmcmc/models.hpp"

using namespace pmcmc;
constexpr double kInf = std::numeric_limits<double>::infinity();

namespace {
Theta lgss_theta(double mu, double phi, double sv) {
  Theta t(3);
  t << mu, phi, sv;
  return t;
}
Theta asv_theta(double mu, double phi, double sv, double alpha) {
  Theta t(4);
  t << mu, phi, sv, alpha;
  return t;
}

std::pair<std::vector<double>, std::vector<double>> simulate(const Model& m,
                                                             const Theta& th,
                                                             int T,
                                                             std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> xs, ys;
  double x = m.sample_initial(th, rng);
  for (int t = 0; t < T; ++t) {
    x = m.sample_transition(th, x, rng);
    xs.push_back(x);
    ys.push_back(m.sample_observation(th, x, rng));
  }
  return {xs, ys};
}
}  // namespace

TEST_CASE("lgss simulation is reproducible and has the AR(1) structure") {
  LgssModel model;
  Theta th = lgss_theta(0.2, 0.8, 1.0);
  auto [x1, y1] = simulate(model, th, 250, 99);
  auto [x2, y2] = simulate(model, th, 250, 99);
  CHECK(x1 == x2);
  CHECK(y1 == y2);

  auto [xl, yl] = simulate(model, th, 20000, 100);
  std::vector<double> a(xl.begin(), xl.end() - 1), b(xl.begin() + 1, xl.end());
  CHECK(oracle::correlation(a, b) == doctest::Approx(0.8).epsilon(0.05));
}

TEST_CASE("lgss with phi = 0 has independent states") {
  LgssModel model;
  Theta th = lgss_theta(0.2, 0.0, 1.0);
  const int T = 10000;
  auto [x, y] = simulate(model, th, T, 3);
  std::vector<double> a(x.begin(), x.end() - 1), b(x.begin() + 1, x.end());
  CHECK(std::abs(oracle::correlation(a, b)) < 3.0 / std::sqrt(T));
}

TEST_CASE("lgss closed-form gradient value") {
  LgssModel model;
  Theta th = lgss_theta(0.0, 0.5, 1.0);
  Eigen::VectorXd g = model.grad_log_transition(th, 1.0, 1.0);
  // residual = 1 - 0.5 = 0.5; d/dmu = r (1 - phi) / sv^2
  CHECK(g[0] == doctest::Approx(0.25));
}

TEST_CASE("transition/observation/prior gradients match finite differences") {
  LgssModel lgss;
  AsvModel asv;
  RngStream rng(17);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    double mu = rng.uniform(0.05, 0.6);
    double phi = rng.uniform(0.3, 0.95);
    double sv = rng.uniform(0.3, 1.5);
    double alpha = rng.uniform(1.1, 1.9);
    double xp = rng.gaussian(0.0, 1.0), xc = rng.gaussian(0.0, 1.0);
    double y = rng.gaussian(0.0, 1.0);

    Theta th = lgss_theta(mu, phi, sv);
    auto ft = [&](const Eigen::VectorXd& v) {
      return lgss.log_transition(v, xp, xc);
    };
    Eigen::VectorXd gt = lgss.grad_log_transition(th, xp, xc);
    CHECK((gt - oracle::fd_gradient(ft, th)).cwiseAbs().maxCoeff() <
          1e-4 * (1.0 + gt.cwiseAbs().maxCoeff()));
    auto fo = [&](const Eigen::VectorXd& v) {
      return lgss.log_observation(v, xc, y);
    };
    CHECK((lgss.grad_log_observation(th, xc, y) - oracle::fd_gradient(fo, th))
              .cwiseAbs()
              .maxCoeff() < 1e-6);
    auto fp = [&](const Eigen::VectorXd& v) { return lgss.log_prior(v); };
    Eigen::VectorXd gp = lgss.grad_log_prior(th);
    CHECK((gp - oracle::fd_gradient(fp, th)).cwiseAbs().maxCoeff() <
          1e-4 * (1.0 + gp.cwiseAbs().maxCoeff()));

    Theta ta = asv_theta(mu, phi, sv, alpha);
    auto fta = [&](const Eigen::VectorXd& v) {
      return asv.log_transition(v, xp, xc);
    };
    Eigen::VectorXd gta = asv.grad_log_transition(ta, xp, xc);
    CHECK((gta - oracle::fd_gradient(fta, ta)).cwiseAbs().maxCoeff() <
          1e-4 * (1.0 + gta.cwiseAbs().maxCoeff()));
    auto fpa = [&](const Eigen::VectorXd& v) { return asv.log_prior(v); };
    Eigen::VectorXd gpa = asv.grad_log_prior(ta);
    CHECK((gpa - oracle::fd_gradient(fpa, ta)).cwiseAbs().maxCoeff() <
          1e-4 * (1.0 + gpa.cwiseAbs().maxCoeff()));
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("lgss observation transform moments") {
  LgssModel model;
  Theta th = lgss_theta(0.2, 0.8, 1.0);
  RngStream rng(23);
  const int n = 100000;
  const double x = 0.7;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double y = model.sample_observation(th, x, rng);
    sum += y;
    sumsq += (y - x) * (y - x);
  }
  CHECK(sum / n == doctest::Approx(x).epsilon(0.005));
  CHECK(sumsq / n == doctest::Approx(0.01).epsilon(0.02));
}

TEST_CASE("observation transforms are strictly monotone") {
  LgssModel lgss;
  AsvModel asv;
  double prev_l = -kInf, prev_a = -kInf;
  for (int i = 0; i <= 2000; ++i) {
    double y = -50.0 + 0.05 * i;
    CHECK(lgss.psi(y) > prev_l);
    CHECK(asv.psi(y) > prev_a);
    prev_l = lgss.psi(y);
    prev_a = asv.psi(y);
  }
}

TEST_CASE("asv observation at alpha = 2 is Gaussian with variance 2 exp(x)") {
  AsvModel model;
  Theta th = asv_theta(0.2, 0.9, 0.3, 2.0);
  RngStream rng(31);
  const int n = 100000;
  std::vector<double> draws(n), exact(n);
  for (auto& v : draws) v = model.sample_observation(th, 0.0, rng);
  for (auto& v : exact) v = rng.gaussian(0.0, std::numbers::sqrt2);
  CHECK(oracle::ks_statistic(draws, exact) < oracle::ks_critical(0.001, n, n));
}

TEST_CASE("asv path at the reported posterior mean is heavy-tailed") {
  AsvModel model;
  Theta th = asv_theta(0.214, 0.931, 0.268, 1.538);
  auto [x, y] = simulate(model, th, 5000, 37);
  double m = oracle::mean(y);
  double s2 = 0.0, s4 = 0.0;
  for (double v : y) {
    double d = v - m;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  double kurtosis = (s4 / y.size()) / std::pow(s2 / y.size(), 2.0);
  CHECK(kurtosis > 10.0);
}

TEST_CASE("asv transform rejects alpha = 1") {
  AsvModel model;
  CHECK_THROWS_AS(model.tau(asv_theta(0.2, 0.9, 0.3, 1.0), 0.0, AuxDraw{1.0, 0.3}),
                  std::domain_error);
}

TEST_CASE("asv perturbed-observation gradient matches finite differences") {
  AsvModel model;
  RngStream rng(41);
  const double eps = 0.1;
  for (int rep = 0; rep < 50; ++rep) {
    Theta th = asv_theta(0.2, 0.9, 0.3, rng.uniform(1.2, 1.9));
    double x = rng.gaussian(0.0, 0.5);
    AuxDraw aux = model.sample_aux(rng);
    double tau0 = model.tau(th, x, aux);
    double ycheck = model.psi(model.tau(th, x, model.sample_aux(rng))) +
                    eps * rng.gaussian();
    double d = ycheck - model.psi(tau0);
    // independent oracle: coarser finite difference of the full log-kernel
    auto logh = [&](const Eigen::VectorXd& v) {
      double r = ycheck - model.psi(model.tau(v, x, aux));
      return -0.5 * r * r / (eps * eps);
    };
    Eigen::VectorXd fd = oracle::fd_gradient(logh, th, 1e-4);
    Eigen::VectorXd g = model.grad_log_h_abc(th, x, aux, d, eps, tau0);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.0);
    CHECK(g[2] == 0.0);
    CHECK(g[3] == doctest::Approx(fd[3]).epsilon(1e-3));
  }
}

TEST_CASE("prior support") {
  LgssModel lgss;
  CHECK(lgss.log_prior(lgss_theta(0.2, 1.5, 1.0)) == -kInf);
  CHECK(lgss.log_prior(lgss_theta(-0.1, 0.8, 1.0)) == -kInf);
  CHECK(lgss.log_prior(lgss_theta(0.2, 0.8, -1.0)) == -kInf);
  CHECK(std::isfinite(lgss.log_prior(lgss_theta(0.2, 0.8, 1.0))));
  CHECK_THROWS_AS(lgss.grad_log_prior(lgss_theta(0.2, 1.5, 1.0)),
                  std::domain_error);
  AsvModel asv;
  CHECK(asv.log_prior(asv_theta(0.2, 0.9, 0.3, 2.1)) == -kInf);
  CHECK(std::isfinite(asv.log_prior(asv_theta(0.2, 0.9, 0.3, 1.5))));
}

TEST_CASE("stability prior peaks at alpha = 5/3") {
  // alpha/2 ~ Beta(6, 2), so the implied density of alpha has mode 2*(5/6).
  AsvModel model;
  double best_alpha = 0.0, best = -kInf;
  for (int i = 1; i < 4000; ++i) {
    double alpha = 2.0 * i / 4000.0;
    double lp = model.log_prior(asv_theta(0.2, 0.9, 0.3, alpha));
    if (lp > best) {
      best = lp;
      best_alpha = alpha;
    }
  }
  CHECK(best_alpha == doctest::Approx(5.0 / 3.0).epsilon(0.01));
}

TEST_CASE("dataset perturbation") {
  LgssModel lgss;
  RngStream rng(53);
  std::vector<double> y = {1.0, -0.5, 0.25, 3.0};
  CHECK_THROWS_AS(perturb_dataset(rng, y, lgss, 0.0), std::domain_error);

  SUBCASE("tiny tolerance leaves the data unchanged") {
    PerturbedDataset d = perturb_dataset(rng, y, lgss, 1e-12);
    for (size_t t = 0; t < y.size(); ++t)
      CHECK(std::abs(d.y_check[t] - y[t]) < 1e-10);
  }
  SUBCASE("draws are recorded and reproducible") {
    RngStream r1(54), r2(54);
    PerturbedDataset a = perturb_dataset(r1, y, lgss, 0.1);
    PerturbedDataset b = perturb_dataset(r2, y, lgss, 0.1);
    CHECK(a.y_check == b.y_check);
    CHECK(a.z == b.z);
    CHECK(a.epsilon == 0.1);
    CHECK(a.y_raw == y);
    for (size_t t = 0; t < y.size(); ++t)
      CHECK(a.y_check[t] == doctest::Approx(y[t] + 0.1 * a.z[t]));
  }
  SUBCASE("arctan transform keeps perturbed values in a bounded band") {
    AsvModel asv;
    Theta th = asv_theta(0.214, 0.931, 0.268, 1.538);
    RngStream sim(55);
    std::vector<double> ys;
    double x = asv.sample_initial(th, sim);
    for (int t = 0; t < 399; ++t) {
      x = asv.sample_transition(th, x, sim);
      ys.push_back(asv.sample_observation(th, x, sim));
    }
    const double eps = 0.1;
    PerturbedDataset d = perturb_dataset(sim, ys, asv, eps);
    for (double v : d.y_check) {
      CHECK(v > -std::numbers::pi / 2 - 5 * eps);
      CHECK(v < std::numbers::pi / 2 + 5 * eps);
    }
  }
}
