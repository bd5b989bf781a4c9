#include "pmcmc/smc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace pmcmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_config(const SmcConfig& cfg, int T) {
  if (cfg.num_particles < 1)
    throw std::domain_error("smc: need at least one particle");
  if (T < 1) throw std::domain_error("smc: empty observation sequence");
  if (cfg.lag < 0 || cfg.lag >= T)
    throw std::domain_error("smc: lag must lie in [0, T)");
}

// Normalize a row of log-weights in place into `w`; returns logmeanexp of the
// row, or -inf if every weight vanished.
double normalize_row(const double* logw, double* w, int n) {
  double mx = kNegInf;
  for (int i = 0; i < n; ++i) mx = std::max(mx, logw[i]);
  if (!std::isfinite(mx)) return kNegInf;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    w[i] = std::exp(logw[i] - mx);
    sum += w[i];
  }
  for (int i = 0; i < n; ++i) w[i] /= sum;
  return mx + std::log(sum / n);
}

void resample_into(RngStream& rng, const double* w, int n_weights, int* anc,
                   int n_out) {
  // Inverse-CDF draws; one independent uniform per offspring.
  thread_local std::vector<double> cdf;
  cdf.resize(n_weights);
  double acc = 0.0;
  for (int i = 0; i < n_weights; ++i) {
    acc += w[i];
    cdf[i] = acc;
  }
  cdf[n_weights - 1] = 1.0;  // guard against round-off at the top
  for (int i = 0; i < n_out; ++i) {
    double u = rng.uniform();
    anc[i] = static_cast<int>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
}

PosteriorEstimate finalize(const ParticleSystem& ps, const Model& model,
                           const std::vector<double>& obs, const Theta& theta,
                           const SmcConfig& cfg) {
  PosteriorEstimate est;
  est.logprior = model.log_prior(theta);
  est.degenerate_t = ps.degenerate_t;
  est.loglik_hat = estimate_loglik(ps);
  if (cfg.compute_gradient && !ps.degenerate_t)
    est.grad_hat = estimate_gradient(ps, model, obs, theta, cfg.lag);
  else
    est.grad_hat = Eigen::VectorXd::Zero(model.dim());
  return est;
}
}  // namespace

double ParticleSystem::ess(int t) const {
  double s = 0.0;
  for (int i = 0; i < num_particles; ++i) {
    double wi = weight(t, i);
    s += wi * wi;
  }
  return s > 0.0 ? 1.0 / s : 0.0;
}

int ParticleSystem::trace_ancestor(int t, int i, int s) const {
  int j = i;
  for (int u = t; u > s; --u) j = ancestor(u, j);
  return j;
}

std::vector<int> multinomial_resample(RngStream& rng,
                                      const std::vector<double>& weights, int n) {
  if (weights.empty()) throw std::domain_error("resample: empty weight vector");
  std::vector<int> idx(n);
  resample_into(rng, weights.data(), static_cast<int>(weights.size()), idx.data(),
                n);
  return idx;
}

std::pair<ParticleSystem, PosteriorEstimate> run_smc(RngStream& rng,
                                                     const Model& model,
                                                     const std::vector<double>& y,
                                                     const Theta& theta,
                                                     const SmcConfig& cfg) {
  const int T = static_cast<int>(y.size());
  check_config(cfg, T);
  if (!model.has_observation_density())
    throw std::logic_error("run_smc: model has no observation density");
  bool adapted = cfg.scheme == SmcScheme::fully_adapted;
  if (adapted && !model.has_adapted_proposal())
    throw std::logic_error("run_smc: model has no fully adapted proposal");
  if (cfg.scheme == SmcScheme::abc)
    throw std::logic_error("run_smc: use run_smc_abc for the perturbed path");

  const int N = cfg.num_particles;
  ParticleSystem ps;
  ps.num_steps = T;
  ps.num_particles = N;
  ps.scheme = cfg.scheme;
  ps.x.resize((T + 1) * N);
  ps.ancestors.resize(T * N);
  ps.log_unnorm_w.resize(T * N);
  ps.weights.assign((T + 1) * N, 1.0 / N);

  for (int i = 0; i < N; ++i) ps.x[i] = model.sample_initial(theta, rng);

  for (int t = 1; t <= T; ++t) {
    double* xrow = ps.x.data() + t * N;
    const double* xprev = ps.x.data() + (t - 1) * N;
    int* anc = ps.ancestors.data() + (t - 1) * N;
    double* logw = ps.log_unnorm_w.data() + (t - 1) * N;
    resample_into(rng, ps.weights.data() + (t - 1) * N, N, anc, N);
    for (int i = 0; i < N; ++i) {
      double xa = xprev[anc[i]];
      if (adapted) {
        xrow[i] = model.sample_adapted(theta, xa, y[t - 1], rng);
        logw[i] = model.log_predictive(theta, xa, y[t - 1]);
      } else {
        xrow[i] = model.sample_transition(theta, xa, rng);
        logw[i] = model.log_observation(theta, xrow[i], y[t - 1]);
      }
    }
    if (normalize_row(logw, ps.weights.data() + t * N, N) == kNegInf) {
      ps.degenerate_t = t;
      break;
    }
  }
  PosteriorEstimate est = finalize(ps, model, y, theta, cfg);
  return {std::move(ps), est};
}

std::pair<ParticleSystem, PosteriorEstimate> run_smc_abc(
    RngStream& rng, const Model& model, const PerturbedDataset& data,
    const Theta& theta, const SmcConfig& cfg) {
  const int T = static_cast<int>(data.y_check.size());
  check_config(cfg, T);
  const double eps = data.epsilon;
  if (!(eps > 0.0)) throw std::domain_error("run_smc_abc: epsilon must be positive");

  const int N = cfg.num_particles;
  ParticleSystem ps;
  ps.num_steps = T;
  ps.num_particles = N;
  ps.scheme = SmcScheme::abc;
  ps.epsilon = eps;
  ps.x.resize((T + 1) * N);
  ps.aux.resize((T + 1) * N);
  ps.tau_val.resize((T + 1) * N);
  ps.ancestors.resize(T * N);
  ps.log_unnorm_w.resize(T * N);
  ps.weights.assign((T + 1) * N, 1.0 / N);

  const double log_kernel_norm =
      -std::log(eps) - 0.5 * std::log(2.0 * std::numbers::pi);
  const double inv_two_eps2 = 0.5 / (eps * eps);

  for (int i = 0; i < N; ++i) {
    ps.x[i] = model.sample_initial(theta, rng);
    ps.aux[i] = model.sample_aux(rng);
  }

  for (int t = 1; t <= T; ++t) {
    double* xrow = ps.x.data() + t * N;
    const double* xprev = ps.x.data() + (t - 1) * N;
    AuxDraw* auxrow = ps.aux.data() + t * N;
    double* taurow = ps.tau_val.data() + t * N;
    int* anc = ps.ancestors.data() + (t - 1) * N;
    double* logw = ps.log_unnorm_w.data() + (t - 1) * N;
    const double yc = data.y_check[t - 1];
    resample_into(rng, ps.weights.data() + (t - 1) * N, N, anc, N);
    for (int i = 0; i < N; ++i) {
      xrow[i] = model.sample_transition(theta, xprev[anc[i]], rng);
      auxrow[i] = model.sample_aux(rng);
      taurow[i] = model.tau(theta, xrow[i], auxrow[i]);
      double d = yc - model.psi(taurow[i]);
      logw[i] = log_kernel_norm - d * d * inv_two_eps2;
      if (std::isnan(logw[i])) logw[i] = kNegInf;
    }
    if (normalize_row(logw, ps.weights.data() + t * N, N) == kNegInf) {
      ps.degenerate_t = t;
      break;
    }
  }
  PosteriorEstimate est = finalize(ps, model, data.y_check, theta, cfg);
  return {std::move(ps), est};
}

double estimate_loglik(const ParticleSystem& ps) {
  if (ps.degenerate_t) return kNegInf;
  const int N = ps.num_particles;
  double total = 0.0;
  for (int t = 1; t <= ps.num_steps; ++t) {
    const double* logw = ps.log_unnorm_w.data() + (t - 1) * N;
    double mx = kNegInf;
    for (int i = 0; i < N; ++i) mx = std::max(mx, logw[i]);
    if (!std::isfinite(mx)) return kNegInf;
    double s = 0.0;
    for (int i = 0; i < N; ++i) s += std::exp(logw[i] - mx);
    total += mx + std::log(s / N);
  }
  return total;
}

Eigen::VectorXd estimate_gradient(const ParticleSystem& ps, const Model& model,
                                  const std::vector<double>& obs,
                                  const Theta& theta, int lag) {
  const int T = ps.num_steps;
  const int N = ps.num_particles;
  if (lag < 0 || lag >= T)
    throw std::domain_error("estimate_gradient: lag must lie in [0, T)");
  if (ps.degenerate_t)
    throw std::logic_error("estimate_gradient: degenerate particle system");
  bool abc = ps.scheme == SmcScheme::abc;
  if (!abc && !model.has_observation_density())
    throw std::logic_error("estimate_gradient: missing observation gradient");

  Eigen::VectorXd grad = model.grad_log_prior(theta);
  std::vector<int> idx(N);
  std::vector<double> acc(N);
  for (int t = 1; t <= T; ++t) {
    int kappa = std::min(t + lag, T);
    // Collapse the kappa_t weights onto the distinct time-t ancestors.
    std::iota(idx.begin(), idx.end(), 0);
    for (int s = kappa; s > t; --s) {
      const int* anc = ps.ancestors.data() + (s - 1) * N;
      for (int i = 0; i < N; ++i) idx[i] = anc[idx[i]];
    }
    std::fill(acc.begin(), acc.end(), 0.0);
    const double* wk = ps.weights.data() + kappa * N;
    for (int i = 0; i < N; ++i) acc[idx[i]] += wk[i];

    const int* anc_t = ps.ancestors.data() + (t - 1) * N;
    for (int j = 0; j < N; ++j) {
      if (acc[j] == 0.0) continue;
      double xj = ps.state(t, j);
      double xp = ps.state(t - 1, anc_t[j]);
      Eigen::VectorXd xi = model.grad_log_transition(theta, xp, xj);
      if (abc) {
        double tau_j = ps.tau_val[t * N + j];
        double d = obs[t - 1] - model.psi(tau_j);
        xi += model.grad_log_h_abc(theta, xj, ps.aux[t * N + j], d, ps.epsilon,
                                   tau_j);
      } else {
        xi += model.grad_log_observation(theta, xj, obs[t - 1]);
      }
      grad += acc[j] * xi;
    }
  }
  return grad;
}

std::vector<double> fixed_lag_smoothed_means(const ParticleSystem& ps, int lag) {
  const int T = ps.num_steps;
  const int N = ps.num_particles;
  std::vector<double> means(T + 1, 0.0);
  std::vector<int> idx(N);
  for (int t = 0; t <= T; ++t) {
    int kappa = std::min(t + lag, T);
    std::iota(idx.begin(), idx.end(), 0);
    for (int s = kappa; s > t; --s) {
      const int* anc = ps.ancestors.data() + (s - 1) * N;
      for (int i = 0; i < N; ++i) idx[i] = anc[idx[i]];
    }
    const double* wk = ps.weights.data() + kappa * N;
    double m = 0.0;
    for (int i = 0; i < N; ++i) m += wk[i] * ps.state(t, idx[i]);
    means[t] = m;
  }
  return means;
}

}  // namespace pmcmc
