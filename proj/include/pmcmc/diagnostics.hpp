#pragma once

#include <string>
#include <vector>

namespace pmcmc {

struct AcfResult {
  std::vector<double> rho;   // lags 0..max_lag, rho[0] = 1
  bool zero_variance = false;
};

// Biased (1/n-normalized) sample autocorrelation after mean removal; the 1/n
// normalization keeps the autocovariance sequence positive semi-definite.
// Requires series.size() >= max_lag + 2.
AcfResult autocorrelation(const std::vector<double>& series, int max_lag);

struct IfOptions {
  bool adapted = true;  // false: fixed truncation lag
  int fixed_lag = 1000;
};

struct IfResult {
  double value = 1.0;
  int lag_used = 0;
  bool zero_variance = false;
};

// Inefficiency factor 1 + 2 sum_{l=1}^{L} rho_l. The adapted rule picks the
// smallest L whose autocorrelation drops below 2/sqrt(n); the fixed rule uses
// L = fixed_lag. Both are capped at n - 2.
IfResult inefficiency_factor(const std::vector<double>& series,
                             const IfOptions& opt = {});

struct ParamSummary {
  std::string name;
  double mean = 0.0, sd = 0.0;
  double q025 = 0.0, q500 = 0.0, q975 = 0.0;
  std::vector<double> hist_edges;  // 65 edges for 64 bins
  std::vector<double> hist_count;
  std::vector<double> kde_x, kde_density;  // Gaussian KDE, Silverman bandwidth
};

struct PosteriorSummary {
  int n = 0;  // samples per parameter
  std::vector<ParamSummary> params;
};

// Moments, quantiles, histogram and KDE table per parameter over the
// post-burn-in window (iterations burnin+1..K). The mean uses pairwise
// summation. Throws when the window is empty.
PosteriorSummary posterior_summary(
    const std::vector<std::vector<double>>& trace_by_param, int burnin,
    const std::vector<std::string>& names = {});

struct MixingReport {
  std::vector<std::string> param_names;
  double acceptance = 0.0;
  std::vector<double> if_adapted, if_fixed;
  std::vector<int> adapted_lag;
  std::vector<std::vector<double>> acf;  // per parameter, lags 0..max_lag
  PosteriorSummary summary;
};

MixingReport mixing_report(const std::vector<std::vector<double>>& trace_by_param,
                           double acceptance, int burnin, int max_lag = 250,
                           const std::vector<std::string>& names = {});

// One cell of the tolerance sweep: absolute errors of one estimated quantity
// against its exact reference, over replicates, at one tolerance value
// (epsilon = 0 marks the plain-filter reference line).
struct SweepCell {
  std::string quantity;
  double epsilon = 0.0;
  int particles = 0;
  std::vector<double> abs_errors;
};

struct SweepRow {
  std::string quantity;
  double epsilon = 0.0;
  int particles = 0;
  double median_log_l1 = 0.0, min_log_l1 = 0.0, max_log_l1 = 0.0;
};

std::vector<SweepRow> epsilon_sweep_report(const std::vector<SweepCell>& cells);

}  // namespace pmcmc
