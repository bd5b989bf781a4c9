#pragma once

#include "pmcmc/rng.hpp"

namespace pmcmc {

// Parameters of the alpha-stable law A(alpha, beta, c, mu): stability
// alpha in (0, 2], skewness beta in [-1, 1], scale c > 0, location mu.
struct StableParams {
  double alpha;
  double beta;
  double c;
  double mu;

  StableParams(double alpha, double beta, double c = 1.0, double mu = 0.0);
};

// Chambers-Mallows-Stuck transform: maps w ~ Exp(1) and u ~ U(-pi/2, pi/2)
// to a draw from A(alpha, beta, 1, 0). Exposed as a pure function so the
// two-branch formula can be exercised with fixed inputs.
double standard_stable_from_draws(double w, double u, double alpha, double beta);

double sample_standard_stable(RngStream& rng, double alpha, double beta);

// Draw from A(alpha, beta, c, mu) by rescaling the standard variate; the
// alpha = 1 case carries the extra beta*(2/pi)*c*log(c) location correction.
double sample_stable(RngStream& rng, const StableParams& p);

}  // namespace pmcmc
