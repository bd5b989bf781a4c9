#include "pmcmc/kalman.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pmcmc {

KalmanResult kalman_filter_smoother(const Eigen::Vector3d& theta,
                                    const std::vector<double>& y, double sigma_e) {
  double mu = theta[0], phi = theta[1], sv = theta[2];
  if (!(std::abs(phi) < 1.0))
    throw std::domain_error("kalman: stationary initialization needs |phi| < 1");
  if (!(sv > 0.0) || !(sigma_e > 0.0))
    throw std::domain_error("kalman: sigma_v and sigma_e must be positive");
  for (double yt : y)
    if (!std::isfinite(yt)) throw std::domain_error("kalman: non-finite data");

  const int T = static_cast<int>(y.size());
  const double sv2 = sv * sv;
  const double se2 = sigma_e * sigma_e;

  // Forward pass; index 0 holds the stationary prior of x_0.
  std::vector<double> mf(T + 1), pf(T + 1), mpred(T + 1), ppred(T + 1);
  mf[0] = mu;
  pf[0] = sv2 / (1.0 - phi * phi);
  double loglik = 0.0;
  for (int t = 1; t <= T; ++t) {
    mpred[t] = mu + phi * (mf[t - 1] - mu);
    ppred[t] = phi * phi * pf[t - 1] + sv2;
    double s = ppred[t] + se2;
    double v = y[t - 1] - mpred[t];
    loglik += -0.5 * std::log(2.0 * std::numbers::pi * s) - 0.5 * v * v / s;
    double gain = ppred[t] / s;
    mf[t] = mpred[t] + gain * v;
    pf[t] = (1.0 - gain) * ppred[t];
  }

  // RTS backward pass with lag-one covariances for the score.
  std::vector<double> ms(T + 1), ps(T + 1), cgain(T + 1);
  ms[T] = mf[T];
  ps[T] = pf[T];
  for (int t = T - 1; t >= 0; --t) {
    cgain[t] = phi * pf[t] / ppred[t + 1];
    ms[t] = mf[t] + cgain[t] * (ms[t + 1] - mpred[t + 1]);
    ps[t] = pf[t] + cgain[t] * cgain[t] * (ps[t + 1] - ppred[t + 1]);
  }

  // Score from the Fisher identity: expectation of the complete-data score
  // under the smoothing distribution. The observation density carries no
  // parameter dependence, so only the initial and transition terms remain.
  Eigen::Vector3d score = Eigen::Vector3d::Zero();
  {
    double d0 = ms[0] - mu;
    double ex0sq = ps[0] + d0 * d0;
    double omp2 = 1.0 - phi * phi;
    score[0] += omp2 / sv2 * d0;
    score[1] += -phi / omp2 + phi / sv2 * ex0sq;
    score[2] += -1.0 / sv + omp2 / (sv2 * sv) * ex0sq;
  }
  for (int t = 1; t <= T; ++t) {
    double dt = ms[t] - mu;
    double dp = ms[t - 1] - mu;
    double cross = cgain[t - 1] * ps[t] + dt * dp;
    double prev_sq = ps[t - 1] + dp * dp;
    double curr_sq = ps[t] + dt * dt;
    double er = dt - phi * dp;
    double er_sq = curr_sq - 2.0 * phi * cross + phi * phi * prev_sq;
    score[0] += (1.0 - phi) / sv2 * er;
    score[1] += (cross - phi * prev_sq) / sv2;
    score[2] += -1.0 / sv + er_sq / (sv2 * sv);
  }

  KalmanResult out;
  out.loglik = loglik;
  out.score = score;
  out.filtered_mean.assign(mf.begin() + 1, mf.end());
  out.filtered_var.assign(pf.begin() + 1, pf.end());
  out.smoothed_mean.assign(ms.begin() + 1, ms.end());
  out.smoothed_var.assign(ps.begin() + 1, ps.end());
  return out;
}

}  // namespace pmcmc
