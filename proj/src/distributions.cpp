#include "pmcmc/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pmcmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364;  // log(sqrt(2*pi))

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}
}  // namespace

double gaussian_pdf(double x, double mean, double sd) {
  require(sd > 0.0, "gaussian: sd must be positive");
  double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double gaussian_logpdf(double x, double mean, double sd) {
  require(sd > 0.0, "gaussian: sd must be positive");
  double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

double gaussian_cdf(double x, double mean, double sd) {
  require(sd > 0.0, "gaussian: sd must be positive");
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

double truncated_gaussian_pdf(double x, double mean, double sd, double a, double b) {
  require(a < b, "truncated gaussian: need a < b");
  if (x < a || x > b) return 0.0;
  double mass = gaussian_cdf(b, mean, sd) - gaussian_cdf(a, mean, sd);
  return gaussian_pdf(x, mean, sd) / mass;
}

double truncated_gaussian_logpdf(double x, double mean, double sd, double a,
                                 double b) {
  require(a < b, "truncated gaussian: need a < b");
  if (x < a || x > b) return kNegInf;
  double mass = gaussian_cdf(b, mean, sd) - gaussian_cdf(a, mean, sd);
  return gaussian_logpdf(x, mean, sd) - std::log(mass);
}

double gamma_pdf(double x, double shape, double rate) {
  require(shape > 0.0 && rate > 0.0, "gamma: shape and rate must be positive");
  if (x <= 0.0) return 0.0;
  return std::pow(rate, shape) * std::pow(x, shape - 1.0) * std::exp(-rate * x) /
         std::tgamma(shape);
}

double gamma_logpdf(double x, double shape, double rate) {
  require(shape > 0.0 && rate > 0.0, "gamma: shape and rate must be positive");
  if (x <= 0.0) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) -
         rate * x;
}

double beta_pdf(double x, double a, double b) {
  require(a > 0.0 && b > 0.0, "beta: parameters must be positive");
  if (x <= 0.0 || x >= 1.0) return 0.0;
  double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  return std::pow(x, a - 1.0) * std::pow(1.0 - x, b - 1.0) * std::exp(log_norm);
}

double beta_logpdf(double x, double a, double b) {
  require(a > 0.0 && b > 0.0, "beta: parameters must be positive");
  if (x <= 0.0 || x >= 1.0) return kNegInf;
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) + std::lgamma(a + b) -
         std::lgamma(a) - std::lgamma(b);
}

double uniform_pdf(double x, double a, double b) {
  require(a < b, "uniform: need a < b");
  return (x < a || x > b) ? 0.0 : 1.0 / (b - a);
}

double uniform_logpdf(double x, double a, double b) {
  require(a < b, "uniform: need a < b");
  return (x < a || x > b) ? kNegInf : -std::log(b - a);
}

double exponential_pdf(double x, double rate) {
  require(rate > 0.0, "exponential: rate must be positive");
  return x < 0.0 ? 0.0 : rate * std::exp(-rate * x);
}

double exponential_logpdf(double x, double rate) {
  require(rate > 0.0, "exponential: rate must be positive");
  return x < 0.0 ? kNegInf : std::log(rate) - rate * x;
}

double sample_truncated_gaussian(RngStream& rng, double mean, double sd, double a,
                                 double b) {
  require(a < b, "truncated gaussian: need a < b");
  for (;;) {
    double x = rng.gaussian(mean, sd);
    if (x >= a && x <= b) return x;
  }
}

}  // namespace pmcmc
