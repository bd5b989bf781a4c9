#include "pmcmc/pmh.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

namespace pmcmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kCurvatureFloor = 1e-10;

Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NonPsdError("matrix is not positive definite");
  return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}
}  // namespace

MvNormal::MvNormal(Theta mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)), llt_(cov_) {
  if (llt_.info() != Eigen::Success)
    throw NonPsdError("mvnormal: covariance is not positive definite");
  logdet_ = 0.0;
  for (int i = 0; i < cov_.rows(); ++i)
    logdet_ += 2.0 * std::log(llt_.matrixL()(i, i));
}

Theta MvNormal::sample(RngStream& rng) const {
  Theta z(mean_.size());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.gaussian();
  return mean_ + llt_.matrixL() * z;
}

double MvNormal::logpdf(const Theta& x) const {
  Theta z = llt_.matrixL().solve(x - mean_);
  return -0.5 * (mean_.size() * std::log(2.0 * std::numbers::pi) + logdet_ +
                 z.squaredNorm());
}

double default_step(ProposalKind kind, int dim) {
  switch (kind) {
    case ProposalKind::pmh0:
      return 2.562 / std::sqrt(static_cast<double>(dim));
    case ProposalKind::pmh1:
      return 1.125 * std::pow(static_cast<double>(dim), -1.0 / 6.0);
    case ProposalKind::pmh2:
    case ProposalKind::qpmh2:
      return 1.0;
  }
  return 1.0;
}

ChainState ChainHistory::state(int k) const {
  ChainState s;
  s.theta = theta[k];
  s.estimate.loglik_hat = loglik[k];
  s.estimate.logprior = logprior[k];
  s.estimate.grad_hat = grad[k];
  s.accepted = accepted[k] != 0;
  s.iteration = k;
  return s;
}

double ChainHistory::acceptance_rate(int burnin) const {
  int n = 0, acc = 0;
  for (int k = std::max(1, burnin + 1); k < length(); ++k) {
    ++n;
    acc += accepted[k] ? 1 : 0;
  }
  return n > 0 ? static_cast<double>(acc) / n : 0.0;
}

std::vector<double> ChainHistory::component(int j, int burnin) const {
  std::vector<double> out;
  out.reserve(std::max(0, length() - burnin - 1));
  for (int k = burnin + 1; k < length(); ++k) out.push_back(theta[k][j]);
  return out;
}

std::vector<double> ChainHistory::loglik_trace(int burnin) const {
  std::vector<double> out;
  out.reserve(std::max(0, length() - burnin - 1));
  for (int k = burnin + 1; k < length(); ++k) out.push_back(loglik[k]);
  return out;
}

double acceptance_probability(double logpost_cand, double logpost_ref,
                              double log_q_fwd, double log_q_rev) {
  if (logpost_cand == kNegInf || std::isnan(logpost_cand)) return 0.0;
  if (logpost_ref == kNegInf) return 1.0;
  double log_ratio = (logpost_cand - logpost_ref) + (log_q_rev - log_q_fwd);
  return std::min(1.0, std::exp(log_ratio));
}

double acceptance_probability(const ChainState& cand, const ChainState& ref,
                              double log_q_fwd, double log_q_rev) {
  return acceptance_probability(
      cand.estimate.loglik_hat + cand.estimate.logprior,
      ref.estimate.loglik_hat + ref.estimate.logprior, log_q_fwd, log_q_rev);
}

GaussianProposal pmh0_proposal(const Theta& ref, const Eigen::MatrixXd& precond,
                               double step) {
  Eigen::MatrixXd pinv =
      precond.size() == 0
          ? Eigen::MatrixXd::Identity(ref.size(), ref.size()).eval()
          : solve_spd(precond);
  return {ref, step * step * pinv};
}

GaussianProposal pmh1_proposal(const Theta& ref, const Eigen::VectorXd& grad,
                               const Eigen::MatrixXd& precond, double step) {
  GaussianProposal p = pmh0_proposal(ref, precond, step);
  p.mean = ref + 0.5 * p.cov * grad;
  return p;
}

GaussianProposal pmh2_proposal(const Theta& ref, const Eigen::VectorXd& grad,
                               const Eigen::MatrixXd& neg_hessian, double step) {
  Eigen::MatrixXd cov = step * step * solve_spd(neg_hessian);
  return {ref + 0.5 * cov * grad, cov};
}

Eigen::MatrixXd bfgs_recursion(
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& sg_pairs) {
  if (sg_pairs.empty())
    throw std::invalid_argument("bfgs_recursion: no secant pairs");
  const int p = static_cast<int>(sg_pairs.front().first.size());
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
  const auto& [s1, g1] = sg_pairs.front();
  double rho1_inv = g1.dot(s1);
  Eigen::MatrixXd binv = rho1_inv / g1.dot(g1) * eye;
  for (const auto& [s, g] : sg_pairs) {
    double rho = 1.0 / g.dot(s);
    Eigen::MatrixXd v = eye - rho * s * g.transpose();
    binv = v * binv * v.transpose() + rho * s * s.transpose();
    binv = 0.5 * (binv + binv.transpose());  // keep exact symmetry
  }
  return binv;
}

BfgsResult bfgs_inverse_hessian(const std::vector<WindowEntry>& window,
                                double delta) {
  if (!(delta > 0.0))
    throw std::domain_error("bfgs_inverse_hessian: delta must be positive");
  if (window.empty())
    throw std::invalid_argument("bfgs_inverse_hessian: empty window");
  const int p = static_cast<int>(window.front().theta.size());

  // Distinct elements only; rejection copies are exact duplicates.
  std::vector<const WindowEntry*> unique;
  for (const auto& e : window) {
    bool seen = false;
    for (const auto* u : unique)
      if (u->theta == e.theta) {
        seen = true;
        break;
      }
    if (!seen) unique.push_back(&e);
  }
  std::stable_sort(unique.begin(), unique.end(),
                   [](const WindowEntry* a, const WindowEntry* b) {
                     if (a->loglik != b->loglik) return a->loglik < b->loglik;
                     return a->iteration < b->iteration;
                   });

  BfgsResult out;
  out.unique_count = static_cast<int>(unique.size());

  // Secant pairs in the positive-curvature convention: the window gradients
  // are of the log-posterior, so the difference is negated to estimate the
  // inverse of the negative Hessian. Pairs without usable curvature are
  // skipped, which keeps every iterate positive definite.
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
  for (size_t l = 0; l + 1 < unique.size(); ++l) {
    Eigen::VectorXd s = unique[l + 1]->theta - unique[l]->theta;
    Eigen::VectorXd g = -(unique[l + 1]->grad - unique[l]->grad);
    if (g.dot(s) > kCurvatureFloor) pairs.emplace_back(std::move(s), std::move(g));
  }
  out.pairs_used = static_cast<int>(pairs.size());

  if (unique.size() < 2 || pairs.empty()) {
    out.sigma = delta * Eigen::MatrixXd::Identity(p, p);
    out.sigma_psd = true;
    out.from_window = false;
    return out;
  }

  out.sigma = bfgs_recursion(pairs);
  out.from_window = true;
  Eigen::LLT<Eigen::MatrixXd> llt(out.sigma);
  out.sigma_psd = llt.info() == Eigen::Success;
  return out;
}

Eigen::MatrixXd hybrid_psd_fallback(const Eigen::MatrixXd& H,
                                    const std::vector<Theta>& trace, int n_hyb) {
  const int p = static_cast<int>(H.rows());
  {
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() == Eigen::Success) return H;
  }
  const int needed = std::max(p + 1, 50);
  if (static_cast<int>(trace.size()) >= needed) {
    int n = std::min<int>(n_hyb, static_cast<int>(trace.size()));
    Eigen::MatrixXd samples(n, p);
    for (int i = 0; i < n; ++i)
      samples.row(i) = trace[trace.size() - n + i].transpose();
    Eigen::RowVectorXd mean = samples.colwise().mean();
    samples.rowwise() -= mean;
    Eigen::MatrixXd cov = samples.transpose() * samples / (n - 1.0);
    return cov + 1e-8 * Eigen::MatrixXd::Identity(p, p);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < p; ++i) ev[i] = std::max(std::abs(ev[i]), 1e-8);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

AnalyticGaussianTarget::AnalyticGaussianTarget(Theta mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov_);
  if (llt.info() != Eigen::Success)
    throw NonPsdError("analytic target: covariance is not positive definite");
  prec_ = llt.solve(Eigen::MatrixXd::Identity(cov_.rows(), cov_.cols()));
  logdet_ = 0.0;
  for (int i = 0; i < cov_.rows(); ++i)
    logdet_ += 2.0 * std::log(llt.matrixL()(i, i));
}

PosteriorEstimate AnalyticGaussianTarget::evaluate(const Theta& theta,
                                                   RngStream&) const {
  PosteriorEstimate est;
  Theta d = theta - mean_;
  est.loglik_hat = -0.5 * (dim() * std::log(2.0 * std::numbers::pi) + logdet_ +
                           d.dot(prec_ * d));
  est.logprior = 0.0;
  est.grad_hat = -prec_ * d;
  return est;
}

ParticleTarget::ParticleTarget(const Model& model, std::vector<double> y,
                               SmcConfig cfg)
    : model_(model), y_(std::move(y)), cfg_(cfg), abc_(false) {
  if (cfg_.scheme == SmcScheme::abc)
    throw std::logic_error("particle target: perturbed scheme needs a dataset");
}

ParticleTarget::ParticleTarget(const Model& model, PerturbedDataset data,
                               SmcConfig cfg)
    : model_(model), data_(std::move(data)), cfg_(cfg), abc_(true) {
  cfg_.scheme = SmcScheme::abc;
  cfg_.epsilon = data_.epsilon;
}

PosteriorEstimate ParticleTarget::evaluate(const Theta& theta,
                                           RngStream& rng) const {
  if (abc_) return run_smc_abc(rng, model_, data_, theta, cfg_).second;
  return run_smc(rng, model_, y_, theta, cfg_).second;
}

namespace {

struct DegeneracyMonitor {
  static constexpr int kWindow = 500;
  std::vector<char> flags = std::vector<char>(kWindow, 0);
  int pos = 0, filled = 0, count = 0;

  // Returns true when a warning fires; resets the window afterwards.
  bool record(bool degenerate) {
    if (filled == kWindow) count -= flags[pos];
    flags[pos] = degenerate ? 1 : 0;
    count += flags[pos];
    pos = (pos + 1) % kWindow;
    filled = std::min(filled + 1, kWindow);
    if (filled == kWindow && count > kWindow * 99 / 100) {
      std::fill(flags.begin(), flags.end(), 0);
      pos = filled = count = 0;
      return true;
    }
    return false;
  }
};

void append_state(ChainHistory& h, const Theta& theta,
                  const PosteriorEstimate& est, bool accepted) {
  h.theta.push_back(theta);
  h.loglik.push_back(est.loglik_hat);
  h.logprior.push_back(est.logprior);
  h.grad.push_back(est.grad_hat.size() ? est.grad_hat
                                       : Eigen::VectorXd::Zero(theta.size()));
  h.accepted.push_back(accepted ? 1 : 0);
}

void append_copy(ChainHistory& h, int from) {
  h.theta.push_back(h.theta[from]);
  h.loglik.push_back(h.loglik[from]);
  h.logprior.push_back(h.logprior[from]);
  h.grad.push_back(h.grad[from]);
  h.accepted.push_back(0);
}

}  // namespace

ChainHistory run_pmh(RngStream& rng, const Target& target,
                     const ProposalSpec& spec, int iterations, int burnin,
                     const Theta& theta0) {
  const int p = target.dim();
  if (theta0.size() != p)
    throw std::invalid_argument("run_pmh: theta0 has the wrong dimension");
  if (!std::isfinite(target.log_prior(theta0)))
    throw std::invalid_argument("run_pmh: theta0 lies outside the prior support");
  if (iterations < 1) throw std::invalid_argument("run_pmh: need iterations >= 1");
  if (spec.kind == ProposalKind::qpmh2 && spec.memory < 2)
    throw std::invalid_argument("run_pmh: quasi-Newton memory must be >= 2");
  if (!(spec.delta > 0.0))
    throw std::invalid_argument("run_pmh: delta must be positive");
  if (spec.precond.size() != 0 &&
      (spec.precond.rows() != p || spec.precond.cols() != p))
    throw std::invalid_argument("run_pmh: preconditioner has the wrong shape");

  const double step = spec.step > 0.0 ? spec.step : default_step(spec.kind, p);
  const int M = spec.memory;

  ChainHistory hist;
  hist.kind = spec.kind;
  hist.memory = spec.kind == ProposalKind::qpmh2 ? M : 0;

  PosteriorEstimate est0 = target.evaluate(theta0, rng);
  append_state(hist, theta0, est0, true);

  DegeneracyMonitor monitor;

  // Post-burn-in samples collected for the hybrid covariance fallback.
  std::vector<Theta> hybrid_trace;

  for (int k = 1; k <= iterations; ++k) {
    const bool quasi = spec.kind == ProposalKind::qpmh2 && k > M;
    const int ref_index = quasi ? k - M : k - 1;
    const Theta& ref_theta = hist.theta[ref_index];
    const double ref_logpost = hist.loglik[ref_index] + hist.logprior[ref_index];

    GaussianProposal fwd;
    if (quasi) {
      std::vector<WindowEntry> window;
      window.reserve(M - 1);
      for (int j = k - M + 1; j <= k - 1; ++j)
        window.push_back({hist.theta[j], hist.grad[j], hist.loglik[j], j});
      BfgsResult bfgs = bfgs_inverse_hessian(window, spec.delta);
      fwd.mean = ref_theta;
      fwd.cov = bfgs.sigma;
      if (!bfgs.sigma_psd) {
        fwd.cov = hybrid_psd_fallback(bfgs.sigma, hybrid_trace,
                                      spec.hybrid_samples);
        ++hist.hybrid_fallback_count;
      }
    } else {
      switch (spec.kind) {
        case ProposalKind::pmh0:
          fwd = pmh0_proposal(ref_theta, spec.precond, step);
          break;
        case ProposalKind::pmh1:
          fwd = pmh1_proposal(ref_theta, hist.grad[ref_index], spec.precond,
                              step);
          break;
        case ProposalKind::pmh2: {
          Eigen::MatrixXd nh = target.negative_hessian(ref_theta);
          try {
            fwd = pmh2_proposal(ref_theta, hist.grad[ref_index], nh, step);
          } catch (const NonPsdError&) {
            Eigen::MatrixXd cov = hybrid_psd_fallback(
                step * step * nh.inverse(), hybrid_trace, spec.hybrid_samples);
            ++hist.hybrid_fallback_count;
            fwd = {ref_theta + 0.5 * cov * hist.grad[ref_index], cov};
          }
          break;
        }
        case ProposalKind::qpmh2:
          // Warmup random walk with covariance delta^{-1} I.
          fwd.mean = ref_theta;
          fwd.cov = (1.0 / spec.delta) *
                    Eigen::MatrixXd::Identity(p, p);
          break;
      }
    }

    MvNormal q_fwd(fwd.mean, fwd.cov);
    Theta cand = q_fwd.sample(rng);
    double log_q_fwd = q_fwd.logpdf(cand);

    bool accept = false;
    PosteriorEstimate cand_est;
    bool evaluated = false;
    if (std::isfinite(target.log_prior(cand))) {
      cand_est = target.evaluate(cand, rng);
      evaluated = true;
      double cand_logpost = cand_est.loglik_hat + cand_est.logprior;
      if (std::isfinite(cand_logpost)) {
        double log_q_rev;
        if (quasi) {
          // Forward and reverse share the window covariance, so the proposal
          // ratio reduces to the (symmetric) Gaussian density exchange.
          log_q_rev = MvNormal(cand, fwd.cov).logpdf(ref_theta);
        } else {
          switch (spec.kind) {
            case ProposalKind::pmh0:
              log_q_rev = MvNormal(cand, fwd.cov).logpdf(ref_theta);
              break;
            case ProposalKind::pmh1: {
              GaussianProposal rev = pmh1_proposal(cand, cand_est.grad_hat,
                                                   spec.precond, step);
              log_q_rev = MvNormal(rev.mean, rev.cov).logpdf(ref_theta);
              break;
            }
            case ProposalKind::pmh2: {
              Eigen::MatrixXd nh = target.negative_hessian(cand);
              GaussianProposal rev;
              try {
                rev = pmh2_proposal(cand, cand_est.grad_hat, nh, step);
              } catch (const NonPsdError&) {
                Eigen::MatrixXd cov = hybrid_psd_fallback(
                    step * step * nh.inverse(), hybrid_trace,
                    spec.hybrid_samples);
                ++hist.hybrid_fallback_count;
                rev = {cand + 0.5 * cov * cand_est.grad_hat, cov};
              }
              log_q_rev = MvNormal(rev.mean, rev.cov).logpdf(ref_theta);
              break;
            }
            default:  // qpmh2 warmup: symmetric random walk
              log_q_rev = MvNormal(cand, fwd.cov).logpdf(ref_theta);
              break;
          }
        }
        double alpha = acceptance_probability(cand_logpost, ref_logpost,
                                              log_q_fwd, log_q_rev);
        accept = rng.uniform() <= alpha;
      }
    }

    bool degenerate = !evaluated || cand_est.loglik_hat == kNegInf ||
                      cand_est.degenerate_t.has_value();
    if (monitor.record(degenerate)) {
      ++hist.degeneracy_warning_count;
      std::cerr << "run_pmh: over 99% of the last " << DegeneracyMonitor::kWindow
                << " proposals had vanishing likelihood (iteration " << k << ")\n";
    }

    if (accept)
      append_state(hist, cand, cand_est, true);
    else
      append_copy(hist, ref_index);

    if (k > burnin) hybrid_trace.push_back(hist.theta.back());
  }
  return hist;
}

}  // namespace pmcmc
