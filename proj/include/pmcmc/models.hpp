#pragma once

#include <memory>

#include "pmcmc/model.hpp"

namespace pmcmc {

// Linear Gaussian state space model:
//   x_{t+1} | x_t ~ N(mu + phi*(x_t - mu), sigma_v^2)
//   y_t     | x_t ~ N(x_t, sigma_e^2)
// with theta = (mu, phi, sigma_v) and sigma_e fixed (default 0.1). The
// initial state is stationary, x_0 ~ N(mu, sigma_v^2 / (1 - phi^2)).
class LgssModel : public Model {
 public:
  explicit LgssModel(double sigma_e = 0.1);

  int dim() const override { return 3; }
  std::vector<std::string> param_names() const override;

  double sigma_e() const { return sigma_e_; }

  double sample_initial(const Theta& theta, RngStream& rng) const override;
  double sample_transition(const Theta& theta, double x_prev,
                           RngStream& rng) const override;
  AuxDraw sample_aux(RngStream& rng) const override;
  double tau(const Theta& theta, double x, const AuxDraw& aux) const override;
  double psi(double y) const override { return y; }

  double log_transition(const Theta& theta, double x_prev,
                        double x_curr) const override;
  bool has_observation_density() const override { return true; }
  double log_observation(const Theta& theta, double x, double y) const override;

  bool has_adapted_proposal() const override { return true; }
  double sample_adapted(const Theta& theta, double x_prev, double y,
                        RngStream& rng) const override;
  double log_predictive(const Theta& theta, double x_prev, double y) const override;

  Eigen::VectorXd grad_log_transition(const Theta& theta, double x_prev,
                                      double x_curr) const override;
  Eigen::VectorXd grad_log_observation(const Theta& theta, double x,
                                       double y) const override;
  Eigen::VectorXd grad_log_h_abc(const Theta& theta, double x, const AuxDraw& aux,
                                 double discrepancy, double epsilon,
                                 double tau_val) const override;

  double log_prior(const Theta& theta) const override;
  Eigen::VectorXd grad_log_prior(const Theta& theta) const override;

 private:
  double sigma_e_;
};

// Stochastic volatility model with symmetric alpha-stable observations:
//   x_{t+1} | x_t ~ N(mu + phi*(x_t - mu), sigma_v^2)
//   y_t     | x_t ~ A(alpha, beta = 0) scaled by exp(x_t / 2)
// with theta = (mu, phi, sigma_v, alpha). The observation density is
// unavailable; the model runs through the perturbed path with
// psi(y) = arctan(y). alpha = 1 is outside the supported transform.
class AsvModel : public Model {
 public:
  AsvModel() = default;

  int dim() const override { return 4; }
  std::vector<std::string> param_names() const override;

  double sample_initial(const Theta& theta, RngStream& rng) const override;
  double sample_transition(const Theta& theta, double x_prev,
                           RngStream& rng) const override;
  AuxDraw sample_aux(RngStream& rng) const override;
  double tau(const Theta& theta, double x, const AuxDraw& aux) const override;
  double psi(double y) const override { return std::atan(y); }

  double log_transition(const Theta& theta, double x_prev,
                        double x_curr) const override;
  bool has_observation_density() const override { return false; }

  Eigen::VectorXd grad_log_transition(const Theta& theta, double x_prev,
                                      double x_curr) const override;
  Eigen::VectorXd grad_log_h_abc(const Theta& theta, double x, const AuxDraw& aux,
                                 double discrepancy, double epsilon,
                                 double tau_val) const override;

  double log_prior(const Theta& theta) const override;
  Eigen::VectorXd grad_log_prior(const Theta& theta) const override;
};

std::unique_ptr<Model> lgss_model(double sigma_e = 0.1);
std::unique_ptr<Model> asv_model();

}  // namespace pmcmc
