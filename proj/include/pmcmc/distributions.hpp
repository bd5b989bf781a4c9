#pragma once

#include "pmcmc/rng.hpp"

namespace pmcmc {

// Densities and log-densities of the distributions used by the model priors
// and the proposal machinery. Log-densities return -inf outside the support;
// invalid hyperparameters throw std::domain_error.

double gaussian_pdf(double x, double mean, double sd);
double gaussian_logpdf(double x, double mean, double sd);
double gaussian_cdf(double x, double mean, double sd);

// Gaussian restricted to [a, b], renormalized by the CDF mass on (a, b).
double truncated_gaussian_pdf(double x, double mean, double sd, double a, double b);
double truncated_gaussian_logpdf(double x, double mean, double sd, double a, double b);

// Gamma with shape a and rate b, so the mean is a/b.
double gamma_pdf(double x, double shape, double rate);
double gamma_logpdf(double x, double shape, double rate);

double beta_pdf(double x, double a, double b);
double beta_logpdf(double x, double a, double b);

double uniform_pdf(double x, double a, double b);
double uniform_logpdf(double x, double a, double b);

double exponential_pdf(double x, double rate);
double exponential_logpdf(double x, double rate);

// Rejection sampler from the untruncated Gaussian; acceptance is high for
// the truncation regions used here.
double sample_truncated_gaussian(RngStream& rng, double mean, double sd, double a,
                                 double b);

}  // namespace pmcmc
