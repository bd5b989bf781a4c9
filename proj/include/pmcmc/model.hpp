#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "pmcmc/rng.hpp"

namespace pmcmc {

using Theta = Eigen::VectorXd;

// Auxiliary observation-noise draws consumed by the observation transform.
struct AuxDraw {
  double v1 = 0.0;
  double v2 = 0.0;
};

// A state space model with scalar states. Only simulators are mandatory; the
// observation density is optional, and models without one are usable through
// the perturbed-observation path alone.
class Model {
 public:
  virtual ~Model() = default;

  virtual int dim() const = 0;
  virtual std::vector<std::string> param_names() const = 0;

  // State simulators.
  virtual double sample_initial(const Theta& theta, RngStream& rng) const = 0;
  virtual double sample_transition(const Theta& theta, double x_prev,
                                   RngStream& rng) const = 0;

  // Observation simulation is split into an auxiliary draw and a deterministic
  // transform y = tau(theta, x, aux), so likelihood-free weighting can rerun
  // the transform on recorded draws.
  virtual AuxDraw sample_aux(RngStream& rng) const = 0;
  virtual double tau(const Theta& theta, double x, const AuxDraw& aux) const = 0;
  double sample_observation(const Theta& theta, double x, RngStream& rng) const {
    return tau(theta, x, sample_aux(rng));
  }

  // One-to-one transform applied to observations before perturbation.
  virtual double psi(double y) const = 0;

  virtual double log_transition(const Theta& theta, double x_prev,
                                double x_curr) const = 0;

  virtual bool has_observation_density() const = 0;
  virtual double log_observation(const Theta&, double, double) const {
    throw std::logic_error("model: observation density unavailable");
  }

  // Fully adapted proposal, available when the one-step conditional
  // p(x_t | x_{t-1}, y_t) is tractable.
  virtual bool has_adapted_proposal() const { return false; }
  virtual double sample_adapted(const Theta&, double, double, RngStream&) const {
    throw std::logic_error("model: adapted proposal unavailable");
  }
  virtual double log_predictive(const Theta&, double, double) const {
    throw std::logic_error("model: predictive density unavailable");
  }

  // Parameter gradients of the transition log-density and, on the tractable
  // path, of the observation log-density.
  virtual Eigen::VectorXd grad_log_transition(const Theta& theta, double x_prev,
                                              double x_curr) const = 0;
  virtual Eigen::VectorXd grad_log_observation(const Theta&, double, double) const {
    throw std::logic_error("model: observation gradient unavailable");
  }

  // Parameter gradient of the log perturbed-observation density
  // log rho_eps(ycheck - psi(tau(theta, x, aux))); `discrepancy` is the
  // residual ycheck - psi(tau_val) and `tau_val` the transform at theta.
  virtual Eigen::VectorXd grad_log_h_abc(const Theta& theta, double x,
                                         const AuxDraw& aux, double discrepancy,
                                         double epsilon, double tau_val) const = 0;

  virtual double log_prior(const Theta& theta) const = 0;
  virtual Eigen::VectorXd grad_log_prior(const Theta& theta) const = 0;

  bool in_support(const Theta& theta) const {
    return std::isfinite(log_prior(theta));
  }
};

// Observations perturbed for likelihood-free filtering:
// y_check[t] = psi(y_raw[t]) + epsilon * z[t], with z drawn once and frozen.
struct PerturbedDataset {
  std::vector<double> y_raw;
  std::vector<double> y_check;
  std::vector<double> z;  // recorded standard-kernel draws
  double epsilon = 0.0;
  std::string kernel = "gaussian";
};

PerturbedDataset perturb_dataset(RngStream& rng, const std::vector<double>& y_raw,
                                 const std::function<double(double)>& psi,
                                 double epsilon);

PerturbedDataset perturb_dataset(RngStream& rng, const std::vector<double>& y_raw,
                                 const Model& model, double epsilon);

}  // namespace pmcmc
