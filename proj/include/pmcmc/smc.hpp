#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "pmcmc/model.hpp"

namespace pmcmc {

enum class SmcScheme { bootstrap, fully_adapted, abc };

struct SmcConfig {
  int num_particles = 100;
  double epsilon = 0.0;   // tolerance; 0 disables the perturbed path
  int lag = 12;           // fixed-lag window for the gradient estimator
  SmcScheme scheme = SmcScheme::bootstrap;
  bool compute_gradient = true;
};

// The particle system produced by one filter invocation: all particles,
// ancestor indices and weights for t = 0..T. Immutable once returned.
struct ParticleSystem {
  int num_steps = 0;      // T
  int num_particles = 0;  // N
  SmcScheme scheme = SmcScheme::bootstrap;
  double epsilon = 0.0;

  // Flat row-major [t * N + i] storage. States run t = 0..T; ancestors and
  // unnormalized log-weights run t = 1..T (row t-1); normalized weights run
  // t = 0..T with the uniform row at t = 0.
  std::vector<double> x;
  std::vector<int> ancestors;
  std::vector<double> log_unnorm_w;
  std::vector<double> weights;

  // Perturbed path only: recorded auxiliary draws and transform values.
  std::vector<AuxDraw> aux;
  std::vector<double> tau_val;

  std::optional<int> degenerate_t;  // first t at which every weight vanished

  double state(int t, int i) const { return x[t * num_particles + i]; }
  int ancestor(int t, int i) const {
    return ancestors[(t - 1) * num_particles + i];
  }
  double log_weight(int t, int i) const {
    return log_unnorm_w[(t - 1) * num_particles + i];
  }
  double weight(int t, int i) const { return weights[t * num_particles + i]; }

  // Effective sample size of the normalized weights at time t.
  double ess(int t) const;

  // Index at time s of the time-s ancestor of particle i at time t (s <= t).
  int trace_ancestor(int t, int i, int s) const;
};

struct PosteriorEstimate {
  double loglik_hat = 0.0;
  double logprior = 0.0;
  Eigen::VectorXd grad_hat;  // gradient of the log-posterior, prior included
  std::optional<int> degenerate_t;
};

// Draw n ancestor indices from the categorical distribution given by the
// normalized weights (multinomial resampling).
std::vector<int> multinomial_resample(RngStream& rng,
                                      const std::vector<double>& weights, int n);

// Particle filter for models with a tractable observation density
// (bootstrap proposal, or the fully adapted one-step conditional when the
// model provides it). Resampling is multinomial at every step.
std::pair<ParticleSystem, PosteriorEstimate> run_smc(RngStream& rng,
                                                     const Model& model,
                                                     const std::vector<double>& y,
                                                     const Theta& theta,
                                                     const SmcConfig& cfg);

// Likelihood-free particle filter on the perturbed model: propagate states
// and auxiliary draws, weight by the Gaussian tolerance kernel evaluated at
// y_check[t] - psi(tau(x, aux)). Weights are handled entirely in log domain.
std::pair<ParticleSystem, PosteriorEstimate> run_smc_abc(
    RngStream& rng, const Model& model, const PerturbedDataset& data,
    const Theta& theta, const SmcConfig& cfg);

// Product-of-weight-means likelihood estimate, computed as
// sum_t logmeanexp(log w_t) with a max shift per factor.
double estimate_loglik(const ParticleSystem& ps);

// Fixed-lag smoothed score estimate of the log-posterior: for each t the
// particle cloud at kappa_t = min(t + lag, T) is traced back to its
// ancestors at t and t-1, and the per-pair transition/observation gradient
// increments are averaged under the kappa_t weights. The prior score is
// added on top. `obs` is y_check for a perturbed-path system, raw y
// otherwise.
Eigen::VectorXd estimate_gradient(const ParticleSystem& ps, const Model& model,
                                  const std::vector<double>& obs,
                                  const Theta& theta, int lag);

// Weighted particle mean of the state at each t under the fixed-lag
// smoothing weights; used for the smoothed log-volatility export.
std::vector<double> fixed_lag_smoothed_means(const ParticleSystem& ps, int lag);

}  // namespace pmcmc
