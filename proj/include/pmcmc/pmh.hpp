#pragma once

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <vector>

#include "pmcmc/smc.hpp"

namespace pmcmc {

enum class ProposalKind { pmh0, pmh1, pmh2, qpmh2 };

struct NonPsdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Frozen multivariate Gaussian with cached Cholesky factor.
class MvNormal {
 public:
  MvNormal(Theta mean, Eigen::MatrixXd cov);  // throws NonPsdError
  const Theta& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  Theta sample(RngStream& rng) const;
  double logpdf(const Theta& x) const;

 private:
  Theta mean_;
  Eigen::MatrixXd cov_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double logdet_ = 0.0;
};

struct ProposalSpec {
  ProposalKind kind = ProposalKind::pmh0;
  // Preconditioner P for the random-walk and gradient proposals; the proposal
  // covariance is step^2 * P^{-1}. Empty means identity.
  Eigen::MatrixXd precond;
  // Step size (epsilon); <= 0 selects the rule of thumb for the kind.
  double step = 0.0;
  int memory = 100;          // window length M of the quasi-Newton proposal
  double delta = 1000.0;     // warmup/fallback scale of the quasi-Newton proposal
  int hybrid_samples = 2500;  // sample budget of the covariance fallback
};

// Rule-of-thumb step sizes: eps0^2 = 2.562^2/p, eps1^2 = 1.125^2 p^{-1/3},
// eps2 = 1.
double default_step(ProposalKind kind, int dim);

struct ChainState {
  Theta theta;
  PosteriorEstimate estimate;
  bool accepted = false;
  int iteration = 0;
};

struct ChainHistory {
  ProposalKind kind = ProposalKind::pmh0;
  int memory = 0;  // M for the quasi-Newton proposal, else 0
  std::vector<Theta> theta;
  std::vector<double> loglik;
  std::vector<double> logprior;
  std::vector<Eigen::VectorXd> grad;
  std::vector<char> accepted;
  int degeneracy_warning_count = 0;
  int hybrid_fallback_count = 0;

  int length() const { return static_cast<int>(theta.size()); }
  ChainState state(int k) const;
  // Fraction of accepted moves over iterations k in (burnin, K].
  double acceptance_rate(int burnin = 0) const;
  // One parameter component over iterations k in (burnin, K].
  std::vector<double> component(int j, int burnin = 0) const;
  std::vector<double> loglik_trace(int burnin = 0) const;
};

// min{1, exp[(logpost' - logpost_ref) + (log q_rev - log q_fwd)]} with the
// conventions: a -inf candidate is never accepted, a -inf reference always is.
double acceptance_probability(double logpost_cand, double logpost_ref,
                              double log_q_fwd, double log_q_rev);
double acceptance_probability(const ChainState& cand, const ChainState& ref,
                              double log_q_fwd, double log_q_rev);

// Mean/covariance of the Gaussian parameter proposals. `precond` is P; the
// second-order variant takes the negative-Hessian estimate directly.
struct GaussianProposal {
  Theta mean;
  Eigen::MatrixXd cov;
};
GaussianProposal pmh0_proposal(const Theta& ref, const Eigen::MatrixXd& precond,
                               double step);
GaussianProposal pmh1_proposal(const Theta& ref, const Eigen::VectorXd& grad,
                               const Eigen::MatrixXd& precond, double step);
// Throws NonPsdError when the negative Hessian is not positive definite; the
// chain loop answers by routing the covariance through the hybrid fallback.
GaussianProposal pmh2_proposal(const Theta& ref, const Eigen::VectorXd& grad,
                               const Eigen::MatrixXd& neg_hessian, double step);

// One (theta, gradient, log-likelihood) element of the sliding window feeding
// the quasi-Newton recursion.
struct WindowEntry {
  Theta theta;
  Eigen::VectorXd grad;
  double loglik = 0.0;
  int iteration = 0;
};

// Raw inverse-Hessian recursion over explicit secant pairs (s_l, g_l):
//   B_{l+1}^{-1} = (I - rho s g^T) B_l^{-1} (I - rho g s^T) + rho s s^T,
// rho^{-1} = g^T s, initialized from the first pair as
// B_1^{-1} = rho_1^{-1} (g_1^T g_1)^{-1} I. No screening is applied.
Eigen::MatrixXd bfgs_recursion(
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& sg_pairs);

struct BfgsResult {
  // Proposal covariance candidate: the recursion output mapped to the
  // positive-curvature convention, or delta * I when fewer than two distinct
  // window elements (or no usable curvature pairs) are available.
  Eigen::MatrixXd sigma;
  bool sigma_psd = false;   // Cholesky of sigma succeeded
  bool from_window = false;  // false when the delta * I fallback was taken
  int unique_count = 0;
  int pairs_used = 0;
};

// Build the local covariance estimate from a window of chain states: extract
// distinct elements (rejection copies are bit-identical), sort ascending by
// stored log-likelihood (ties by iteration), form secant pairs from
// consecutive ordered elements, skip pairs without usable curvature, and run
// the recursion. The window gradients are of the log-posterior; internally
// the pairs are flipped to the positive-curvature convention so that sigma
// estimates the inverse negative Hessian.
BfgsResult bfgs_inverse_hessian(const std::vector<WindowEntry>& window,
                                double delta);

// Returns H unchanged when positive definite. Otherwise falls back to the
// empirical covariance of the most recent min(n_hyb, available) post-burn-in
// samples (needs at least max(p+1, 50) of them), regularized by 1e-8 I, and
// as a last resort mirrors negative eigenvalues with a 1e-8 floor.
Eigen::MatrixXd hybrid_psd_fallback(const Eigen::MatrixXd& H,
                                    const std::vector<Theta>& trace, int n_hyb);

// A log-posterior (estimate) provider driven by the chain.
class Target {
 public:
  virtual ~Target() = default;
  virtual int dim() const = 0;
  virtual PosteriorEstimate evaluate(const Theta& theta, RngStream& rng) const = 0;
  virtual double log_prior(const Theta& theta) const = 0;
  virtual bool has_negative_hessian() const { return false; }
  virtual Eigen::MatrixXd negative_hessian(const Theta&) const {
    throw std::logic_error("target: negative Hessian unavailable");
  }
};

// Exact Gaussian log-density target (no particles); used to validate the
// samplers against a target whose posterior is known in closed form.
class AnalyticGaussianTarget : public Target {
 public:
  AnalyticGaussianTarget(Theta mean, Eigen::MatrixXd cov);
  int dim() const override { return static_cast<int>(mean_.size()); }
  PosteriorEstimate evaluate(const Theta& theta, RngStream& rng) const override;
  double log_prior(const Theta&) const override { return 0.0; }
  bool has_negative_hessian() const override { return true; }
  Eigen::MatrixXd negative_hessian(const Theta&) const override { return prec_; }
  const Theta& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }

 private:
  Theta mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd prec_;
  double logdet_ = 0.0;
};

// Pseudo-marginal target: every evaluation runs one particle filter.
class ParticleTarget : public Target {
 public:
  ParticleTarget(const Model& model, std::vector<double> y, SmcConfig cfg);
  ParticleTarget(const Model& model, PerturbedDataset data, SmcConfig cfg);
  int dim() const override { return model_.dim(); }
  PosteriorEstimate evaluate(const Theta& theta, RngStream& rng) const override;
  double log_prior(const Theta& theta) const override {
    return model_.log_prior(theta);
  }
  const SmcConfig& config() const { return cfg_; }

 private:
  const Model& model_;
  std::vector<double> y_;
  PerturbedDataset data_;
  SmcConfig cfg_;
  bool abc_ = false;
};

// Metropolis-Hastings over the target. The quasi-Newton kind proposes from
// N(theta_{k-M}, sigma) with sigma built from the window k-M+1..k-1, accepts
// against the lag-M state, and copies the lag-M state on rejection; its first
// M iterations run a random walk with covariance delta^{-1} I. `burnin` marks
// where the hybrid fallback may start drawing on the trace.
ChainHistory run_pmh(RngStream& rng, const Target& target,
                     const ProposalSpec& spec, int iterations, int burnin,
                     const Theta& theta0);

}  // namespace pmcmc
