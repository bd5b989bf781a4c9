#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pmcmc/distributions.hpp"
#include "pmcmc/kalman.hpp"
#include "pmcmc/models.hpp"

using namespace pmcmc;

namespace {
std::vector<double> simulate_lgss(const Eigen::Vector3d& th, int T,
                                  std::uint64_t seed, double sigma_e = 0.1) {
  LgssModel model(sigma_e);
  Theta theta(3);
  theta << th[0], th[1], th[2];
  RngStream rng(seed);
  std::vector<double> y;
  double x = model.sample_initial(theta, rng);
  for (int t = 0; t < T; ++t) {
    x = model.sample_transition(theta, x, rng);
    y.push_back(model.sample_observation(theta, x, rng));
  }
  return y;
}
}  // namespace

TEST_CASE("single observation with phi = 0 is the marginal gaussian") {
  Eigen::Vector3d th(0.3, 0.0, 1.2);
  std::vector<double> y = {0.7};
  KalmanResult res = kalman_filter_smoother(th, y, 0.1);
  double expected = gaussian_logpdf(0.7, 0.3, std::sqrt(1.2 * 1.2 + 0.01));
  CHECK(res.loglik == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("score matches finite differences of the log-likelihood") {
  std::vector<double> y = simulate_lgss({0.2, 0.8, 1.0}, 200, 42);
  RngStream rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::Vector3d th(rng.uniform(0.05, 0.5), rng.uniform(0.3, 0.95),
                       rng.uniform(0.5, 1.5));
    KalmanResult res = kalman_filter_smoother(th, y, 0.1);
    auto ll = [&](const Eigen::VectorXd& v) {
      return kalman_filter_smoother(Eigen::Vector3d(v[0], v[1], v[2]), y, 0.1)
          .loglik;
    };
    Eigen::VectorXd fd = oracle::fd_gradient(ll, th, 1e-5);
    for (int j = 0; j < 3; ++j)
      CHECK(res.score[j] ==
            doctest::Approx(fd[j]).epsilon(1e-5).scale(std::abs(fd[j]) + 1.0));
  }
}

TEST_CASE("score with phi = 0 matches the iid closed form in mu") {
  std::vector<double> y = simulate_lgss({0.4, 0.0, 1.0}, 150, 7);
  Eigen::Vector3d th(0.4, 0.0, 1.0);
  KalmanResult res = kalman_filter_smoother(th, y, 0.1);
  double s = 0.0;
  for (double v : y) s += (v - 0.4) / (1.0 + 0.01);
  CHECK(res.score[0] == doctest::Approx(s).epsilon(1e-10));
}

TEST_CASE("score at the generating parameters is statistically small") {
  // score^T I^{-1} score is asymptotically chi-squared(3); I from finite
  // differences of the exact score.
  std::vector<double> y = simulate_lgss({0.2, 0.8, 1.0}, 250, 11);
  Eigen::Vector3d th(0.2, 0.8, 1.0);
  KalmanResult res = kalman_filter_smoother(th, y, 0.1);
  Eigen::Matrix3d info;
  double h = 1e-5;
  for (int j = 0; j < 3; ++j) {
    Eigen::Vector3d tp = th, tm = th;
    tp[j] += h;
    tm[j] -= h;
    info.col(j) = -(kalman_filter_smoother(tp, y, 0.1).score -
                    kalman_filter_smoother(tm, y, 0.1).score) /
                  (2.0 * h);
  }
  info = 0.5 * (info + info.transpose());
  double stat = res.score.dot(info.llt().solve(res.score));
  CHECK(stat < oracle::chi2_quantile(0.999, 3));
}

TEST_CASE("smoothing never inflates the filtered variance") {
  std::vector<double> y = simulate_lgss({0.2, 0.8, 1.0}, 250, 13);
  KalmanResult res = kalman_filter_smoother({0.2, 0.8, 1.0}, y, 0.1);
  REQUIRE(res.smoothed_var.size() == y.size());
  for (size_t t = 0; t < y.size(); ++t) {
    CHECK(res.smoothed_var[t] <= res.filtered_var[t] + 1e-12);
    CHECK(res.smoothed_var[t] > 0.0);
    CHECK(res.filtered_var[t] > 0.0);
  }
}

TEST_CASE("input validation") {
  std::vector<double> y = {0.1, 0.2};
  CHECK_THROWS_AS(kalman_filter_smoother({0.2, 1.0, 1.0}, y, 0.1),
                  std::domain_error);
  CHECK_THROWS_AS(kalman_filter_smoother({0.2, 0.8, -1.0}, y, 0.1),
                  std::domain_error);
  std::vector<double> bad = {0.1, std::nan("")};
  CHECK_THROWS_AS(kalman_filter_smoother({0.2, 0.8, 1.0}, bad, 0.1),
                  std::domain_error);
}
