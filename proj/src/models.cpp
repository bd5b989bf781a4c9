#include "pmcmc/models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pmcmc/distributions.hpp"
#include "pmcmc/stable.hpp"

namespace pmcmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Priors shared by both models: mu ~ TN_(0,1)(0, 0.2^2),
// phi ~ TN_(-1,1)(0.9, 0.05^2), sigma_v ~ Gamma(0.2, 0.2).
double log_prior_ar1(double mu, double phi, double sigma_v) {
  return truncated_gaussian_logpdf(mu, 0.0, 0.2, 0.0, 1.0) +
         truncated_gaussian_logpdf(phi, 0.9, 0.05, -1.0, 1.0) +
         gamma_logpdf(sigma_v, 0.2, 0.2);
}

// Score of the AR(1) priors, valid strictly inside the support. Truncation
// does not change the score since the normalizing mass is constant in theta.
void grad_log_prior_ar1(double mu, double phi, double sigma_v,
                        Eigen::VectorXd& out) {
  out[0] = -mu / (0.2 * 0.2);
  out[1] = -(phi - 0.9) / (0.05 * 0.05);
  out[2] = (0.2 - 1.0) / sigma_v - 0.2;
}

void grad_log_transition_ar1(const Theta& theta, double x_prev, double x_curr,
                             Eigen::VectorXd& out) {
  double mu = theta[0], phi = theta[1], sv = theta[2];
  double r = x_curr - mu - phi * (x_prev - mu);
  double inv_v = 1.0 / (sv * sv);
  out[0] = r * (1.0 - phi) * inv_v;
  out[1] = r * (x_prev - mu) * inv_v;
  out[2] = -1.0 / sv + r * r / (sv * sv * sv);
}

double sample_stationary_initial(const Theta& theta, RngStream& rng) {
  double mu = theta[0], phi = theta[1], sv = theta[2];
  double denom = 1.0 - phi * phi;
  if (!(denom > 0.0))
    throw std::domain_error("model: stationary initial state needs |phi| < 1");
  return rng.gaussian(mu, sv / std::sqrt(denom));
}
}  // namespace

PerturbedDataset perturb_dataset(RngStream& rng, const std::vector<double>& y_raw,
                                 const std::function<double(double)>& psi,
                                 double epsilon) {
  if (!(epsilon > 0.0))
    throw std::domain_error("perturb_dataset: epsilon must be positive");
  PerturbedDataset out;
  out.y_raw = y_raw;
  out.epsilon = epsilon;
  out.z.reserve(y_raw.size());
  out.y_check.reserve(y_raw.size());
  for (double y : y_raw) {
    double z = rng.gaussian();
    out.z.push_back(z);
    out.y_check.push_back(psi(y) + epsilon * z);
  }
  return out;
}

PerturbedDataset perturb_dataset(RngStream& rng, const std::vector<double>& y_raw,
                                 const Model& model, double epsilon) {
  return perturb_dataset(
      rng, y_raw, [&model](double y) { return model.psi(y); }, epsilon);
}

// ---------------------------------------------------------------------------
// LGSS
// ---------------------------------------------------------------------------

LgssModel::LgssModel(double sigma_e) : sigma_e_(sigma_e) {
  if (!(sigma_e > 0.0))
    throw std::domain_error("lgss: sigma_e must be positive");
}

std::vector<std::string> LgssModel::param_names() const {
  return {"mu", "phi", "sigma_v"};
}

double LgssModel::sample_initial(const Theta& theta, RngStream& rng) const {
  return sample_stationary_initial(theta, rng);
}

double LgssModel::sample_transition(const Theta& theta, double x_prev,
                                    RngStream& rng) const {
  return rng.gaussian(theta[0] + theta[1] * (x_prev - theta[0]), theta[2]);
}

AuxDraw LgssModel::sample_aux(RngStream& rng) const {
  return {rng.uniform_open(), rng.uniform()};
}

double LgssModel::tau(const Theta&, double x, const AuxDraw& aux) const {
  return boxmuller(aux.v1, aux.v2, x, sigma_e_);
}

double LgssModel::log_transition(const Theta& theta, double x_prev,
                                 double x_curr) const {
  return gaussian_logpdf(x_curr, theta[0] + theta[1] * (x_prev - theta[0]),
                         theta[2]);
}

double LgssModel::log_observation(const Theta&, double x, double y) const {
  return gaussian_logpdf(y, x, sigma_e_);
}

double LgssModel::sample_adapted(const Theta& theta, double x_prev, double y,
                                 RngStream& rng) const {
  double sv2 = theta[2] * theta[2];
  double se2 = sigma_e_ * sigma_e_;
  double s2 = 1.0 / (1.0 / sv2 + 1.0 / se2);
  double mf = theta[0] + theta[1] * (x_prev - theta[0]);
  double m = s2 * (mf / sv2 + y / se2);
  return rng.gaussian(m, std::sqrt(s2));
}

double LgssModel::log_predictive(const Theta& theta, double x_prev,
                                 double y) const {
  double mf = theta[0] + theta[1] * (x_prev - theta[0]);
  double var = theta[2] * theta[2] + sigma_e_ * sigma_e_;
  return gaussian_logpdf(y, mf, std::sqrt(var));
}

Eigen::VectorXd LgssModel::grad_log_transition(const Theta& theta, double x_prev,
                                               double x_curr) const {
  Eigen::VectorXd g(3);
  grad_log_transition_ar1(theta, x_prev, x_curr, g);
  return g;
}

Eigen::VectorXd LgssModel::grad_log_observation(const Theta&, double, double) const {
  return Eigen::VectorXd::Zero(3);  // sigma_e is fixed, not part of theta
}

Eigen::VectorXd LgssModel::grad_log_h_abc(const Theta&, double, const AuxDraw&,
                                          double, double, double) const {
  return Eigen::VectorXd::Zero(3);  // tau does not depend on theta
}

double LgssModel::log_prior(const Theta& theta) const {
  return log_prior_ar1(theta[0], theta[1], theta[2]);
}

Eigen::VectorXd LgssModel::grad_log_prior(const Theta& theta) const {
  if (!std::isfinite(log_prior(theta)))
    throw std::domain_error("lgss: prior gradient requested outside support");
  Eigen::VectorXd g(3);
  grad_log_prior_ar1(theta[0], theta[1], theta[2], g);
  return g;
}

// ---------------------------------------------------------------------------
// alpha-stable stochastic volatility
// ---------------------------------------------------------------------------

std::vector<std::string> AsvModel::param_names() const {
  return {"mu", "phi", "sigma_v", "alpha"};
}

double AsvModel::sample_initial(const Theta& theta, RngStream& rng) const {
  return sample_stationary_initial(theta, rng);
}

double AsvModel::sample_transition(const Theta& theta, double x_prev,
                                   RngStream& rng) const {
  return rng.gaussian(theta[0] + theta[1] * (x_prev - theta[0]), theta[2]);
}

AuxDraw AsvModel::sample_aux(RngStream& rng) const {
  return {rng.exponential(),
          rng.uniform(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi)};
}

double AsvModel::tau(const Theta& theta, double x, const AuxDraw& aux) const {
  double alpha = theta[3];
  if (std::abs(alpha - 1.0) < 1e-8)
    throw std::domain_error("asv: observation transform undefined at alpha = 1");
  return std::exp(0.5 * x) * standard_stable_from_draws(aux.v1, aux.v2, alpha, 0.0);
}

double AsvModel::log_transition(const Theta& theta, double x_prev,
                                double x_curr) const {
  return gaussian_logpdf(x_curr, theta[0] + theta[1] * (x_prev - theta[0]),
                         theta[2]);
}

Eigen::VectorXd AsvModel::grad_log_transition(const Theta& theta, double x_prev,
                                              double x_curr) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
  grad_log_transition_ar1(theta, x_prev, x_curr, g);
  return g;
}

Eigen::VectorXd AsvModel::grad_log_h_abc(const Theta& theta, double x,
                                         const AuxDraw& aux, double discrepancy,
                                         double epsilon, double tau_val) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
  // Only alpha enters the transform; its derivative is taken by a central
  // difference holding the auxiliary draws fixed. The bracket is pulled
  // one-sided at the edges of (0, 2) and around the alpha = 1 singularity.
  double alpha = theta[3];
  double h = 1e-6;
  double lo = std::max(alpha - h, 1e-12);
  double hi = std::min(alpha + h, 2.0 - 1e-12);
  if (alpha > 1.0 && lo < 1.0 + 1e-8) lo = alpha;
  if (alpha < 1.0 && hi > 1.0 - 1e-8) hi = alpha;
  Theta tp = theta, tm = theta;
  tp[3] = hi;
  tm[3] = lo;
  double dtau = (tau(tp, x, aux) - tau(tm, x, aux)) / (hi - lo);
  double dpsi = 1.0 / (1.0 + tau_val * tau_val);
  g[3] = discrepancy / (epsilon * epsilon) * dpsi * dtau;
  return g;
}

double AsvModel::log_prior(const Theta& theta) const {
  double alpha = theta[3];
  double lp = log_prior_ar1(theta[0], theta[1], theta[2]);
  // alpha/2 ~ Beta(6, 2); the 1/2 Jacobian is a constant shift.
  return lp + beta_logpdf(0.5 * alpha, 6.0, 2.0) - std::log(2.0);
}

Eigen::VectorXd AsvModel::grad_log_prior(const Theta& theta) const {
  if (!std::isfinite(log_prior(theta)))
    throw std::domain_error("asv: prior gradient requested outside support");
  Eigen::VectorXd g(4);
  grad_log_prior_ar1(theta[0], theta[1], theta[2], g);
  double half_alpha = 0.5 * theta[3];
  g[3] = 0.5 * ((6.0 - 1.0) / half_alpha - (2.0 - 1.0) / (1.0 - half_alpha));
  return g;
}

std::unique_ptr<Model> lgss_model(double sigma_e) {
  return std::make_unique<LgssModel>(sigma_e);
}

std::unique_ptr<Model> asv_model() { return std::make_unique<AsvModel>(); }

}  // namespace pmcmc
