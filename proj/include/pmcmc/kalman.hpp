#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pmcmc {

struct KalmanResult {
  double loglik = 0.0;
  Eigen::Vector3d score = Eigen::Vector3d::Zero();  // d loglik / d(mu, phi, sigma_v)
  std::vector<double> filtered_mean, filtered_var;
  std::vector<double> smoothed_mean, smoothed_var;
};

// Exact filter/smoother for the scalar AR(1)-plus-noise model
//   x_{t+1} = mu + phi*(x_t - mu) + sigma_v * v_t,   y_t = x_t + sigma_e * e_t
// with stationary initialization. The log-likelihood comes from the
// prediction-error decomposition and the score from smoothed moments (RTS
// pass with lag-one covariances), so it can stand as an independent reference
// for simulation-based estimates of both quantities.
KalmanResult kalman_filter_smoother(const Eigen::Vector3d& theta,
                                    const std::vector<double>& y, double sigma_e);

}  // namespace pmcmc
