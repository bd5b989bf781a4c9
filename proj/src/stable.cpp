#include "pmcmc/stable.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pmcmc {

namespace {
constexpr double kPi = std::numbers::pi;
// The alpha != 1 branch is numerically singular near 1; route a narrow band
// to the exact alpha = 1 branch instead of taking limits.
constexpr double kAlphaOneBand = 1e-8;

void check_stability(double alpha, double beta) {
  if (!(alpha > 0.0) || alpha > 2.0)
    throw std::domain_error("stable: alpha must lie in (0, 2]");
  if (beta < -1.0 || beta > 1.0)
    throw std::domain_error("stable: beta must lie in [-1, 1]");
}
}  // namespace

StableParams::StableParams(double alpha_, double beta_, double c_, double mu_)
    : alpha(alpha_), beta(beta_), c(c_), mu(mu_) {
  check_stability(alpha, beta);
  if (!(c > 0.0)) throw std::domain_error("stable: scale c must be positive");
}

double standard_stable_from_draws(double w, double u, double alpha, double beta) {
  check_stability(alpha, beta);
  if (std::abs(alpha - 1.0) < kAlphaOneBand) {
    double half_pi_beta_u = 0.5 * kPi + beta * u;
    return (2.0 / kPi) *
           (half_pi_beta_u * std::tan(u) -
            beta * std::log((0.5 * kPi * w * std::cos(u)) / half_pi_beta_u));
  }
  double t_ab = std::atan(beta * std::tan(0.5 * kPi * alpha)) / alpha;
  double num = std::sin(alpha * (u + t_ab));
  double den = std::pow(std::cos(alpha * t_ab) * std::cos(u), 1.0 / alpha);
  double tail =
      std::pow(std::cos(alpha * t_ab + (alpha - 1.0) * u) / w, (1.0 - alpha) / alpha);
  return num / den * tail;
}

double sample_standard_stable(RngStream& rng, double alpha, double beta) {
  check_stability(alpha, beta);
  double w = rng.exponential();
  double u = rng.uniform(-0.5 * kPi, 0.5 * kPi);
  return standard_stable_from_draws(w, u, alpha, beta);
}

double sample_stable(RngStream& rng, const StableParams& p) {
  double y = sample_standard_stable(rng, p.alpha, p.beta);
  if (std::abs(p.alpha - 1.0) < kAlphaOneBand)
    return p.c * y + p.mu + p.beta * (2.0 / kPi) * p.c * std::log(p.c);
  return p.c * y + p.mu;
}

}  // namespace pmcmc
