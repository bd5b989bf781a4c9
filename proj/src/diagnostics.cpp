#include "pmcmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pmcmc/distributions.hpp"

namespace pmcmc {

namespace {

double pairwise_sum(const double* x, int n) {
  if (n <= 32) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x[i];
    return s;
  }
  int half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  int n = static_cast<int>(sorted.size());
  if (n == 1) return sorted[0];
  double h = (n - 1) * p;
  int lo = static_cast<int>(std::floor(h));
  int hi = std::min(lo + 1, n - 1);
  return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

// rho_l on a pre-centered series with precomputed c0.
double acf_lag(const std::vector<double>& centered, double c0, int lag) {
  int n = static_cast<int>(centered.size());
  double c = 0.0;
  for (int t = 0; t + lag < n; ++t) c += centered[t] * centered[t + lag];
  return c / n / c0;
}

std::vector<double> center(const std::vector<double>& series, double& c0) {
  int n = static_cast<int>(series.size());
  double mean = pairwise_sum(series.data(), n) / n;
  std::vector<double> centered(n);
  for (int t = 0; t < n; ++t) centered[t] = series[t] - mean;
  c0 = 0.0;
  for (double v : centered) c0 += v * v;
  c0 /= n;
  return centered;
}

}  // namespace

AcfResult autocorrelation(const std::vector<double>& series, int max_lag) {
  int n = static_cast<int>(series.size());
  if (max_lag < 0) throw std::invalid_argument("autocorrelation: negative lag");
  if (n < max_lag + 2)
    throw std::invalid_argument("autocorrelation: series too short for max_lag");
  AcfResult out;
  out.rho.assign(max_lag + 1, 0.0);
  double c0 = 0.0;
  std::vector<double> centered = center(series, c0);
  if (c0 == 0.0) {
    out.zero_variance = true;
    return out;
  }
  out.rho[0] = 1.0;
  for (int l = 1; l <= max_lag; ++l) out.rho[l] = acf_lag(centered, c0, l);
  return out;
}

IfResult inefficiency_factor(const std::vector<double>& series,
                             const IfOptions& opt) {
  int n = static_cast<int>(series.size());
  if (n < 4) throw std::invalid_argument("inefficiency_factor: series too short");
  IfResult out;
  double c0 = 0.0;
  std::vector<double> centered = center(series, c0);
  if (c0 == 0.0) {
    out.zero_variance = true;
    return out;
  }
  int cap = n - 2;
  double sum = 0.0;
  if (opt.adapted) {
    double threshold = 2.0 / std::sqrt(static_cast<double>(n));
    int l = 1;
    for (; l <= cap; ++l) {
      double rho = acf_lag(centered, c0, l);
      sum += rho;
      if (std::abs(rho) < threshold) break;  // first insignificant lag
    }
    out.lag_used = std::min(l, cap);
  } else {
    int L = std::min(opt.fixed_lag, cap);
    for (int l = 1; l <= L; ++l) sum += acf_lag(centered, c0, l);
    out.lag_used = L;
  }
  out.value = 1.0 + 2.0 * sum;
  return out;
}

PosteriorSummary posterior_summary(
    const std::vector<std::vector<double>>& trace_by_param, int burnin,
    const std::vector<std::string>& names) {
  if (trace_by_param.empty())
    throw std::invalid_argument("posterior_summary: no parameters");
  int total = static_cast<int>(trace_by_param.front().size());
  int n = total - (burnin + 1);
  if (n < 1)
    throw std::invalid_argument("posterior_summary: empty post-burn-in window");

  PosteriorSummary out;
  out.n = n;
  for (size_t jp = 0; jp < trace_by_param.size(); ++jp) {
    const auto& full = trace_by_param[jp];
    std::vector<double> x(full.begin() + burnin + 1, full.end());
    ParamSummary s;
    s.name = jp < names.size() ? names[jp] : "theta_" + std::to_string(jp + 1);
    s.mean = pairwise_sum(x.data(), n) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - s.mean) * (v - s.mean);
    s.sd = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;

    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    s.q025 = quantile_sorted(sorted, 0.025);
    s.q500 = quantile_sorted(sorted, 0.5);
    s.q975 = quantile_sorted(sorted, 0.975);

    double lo = sorted.front(), hi = sorted.back();
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
    constexpr int kBins = 64;
    s.hist_edges.resize(kBins + 1);
    s.hist_count.assign(kBins, 0.0);
    for (int b = 0; b <= kBins; ++b)
      s.hist_edges[b] = lo + (hi - lo) * b / kBins;
    for (double v : x) {
      int b = std::min(kBins - 1,
                       static_cast<int>((v - lo) / (hi - lo) * kBins));
      s.hist_count[std::max(0, b)] += 1.0;
    }

    // Silverman rule-of-thumb bandwidth.
    double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double spread = std::min(s.sd, iqr / 1.34);
    if (spread == 0.0) spread = s.sd;
    double bw = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
    if (bw > 0.0) {
      constexpr int kGrid = 256;
      double glo = lo - 3.0 * bw, ghi = hi + 3.0 * bw;
      s.kde_x.resize(kGrid);
      s.kde_density.assign(kGrid, 0.0);
      for (int g = 0; g < kGrid; ++g) {
        s.kde_x[g] = glo + (ghi - glo) * g / (kGrid - 1);
        double acc = 0.0;
        for (double v : x) acc += gaussian_pdf(s.kde_x[g], v, bw);
        s.kde_density[g] = acc / n;
      }
    }
    out.params.push_back(std::move(s));
  }
  return out;
}

MixingReport mixing_report(const std::vector<std::vector<double>>& trace_by_param,
                           double acceptance, int burnin, int max_lag,
                           const std::vector<std::string>& names) {
  MixingReport rep;
  rep.acceptance = acceptance;
  rep.summary = posterior_summary(trace_by_param, burnin, names);
  for (size_t jp = 0; jp < trace_by_param.size(); ++jp) {
    const auto& full = trace_by_param[jp];
    std::vector<double> x(full.begin() + burnin + 1, full.end());
    rep.param_names.push_back(rep.summary.params[jp].name);
    IfResult ad = inefficiency_factor(x, {.adapted = true});
    IfResult fx = inefficiency_factor(x, {.adapted = false, .fixed_lag = 1000});
    rep.if_adapted.push_back(ad.value);
    rep.if_fixed.push_back(fx.value);
    rep.adapted_lag.push_back(ad.lag_used);
    int lmax = std::min<int>(max_lag, static_cast<int>(x.size()) - 2);
    rep.acf.push_back(autocorrelation(x, lmax).rho);
  }
  return rep;
}

std::vector<SweepRow> epsilon_sweep_report(const std::vector<SweepCell>& cells) {
  std::vector<SweepRow> rows;
  for (const auto& cell : cells) {
    if (cell.abs_errors.empty())
      throw std::invalid_argument("epsilon_sweep_report: empty cell");
    std::vector<double> logs;
    logs.reserve(cell.abs_errors.size());
    for (double e : cell.abs_errors) logs.push_back(std::log(std::abs(e)));
    std::sort(logs.begin(), logs.end());
    SweepRow row;
    row.quantity = cell.quantity;
    row.epsilon = cell.epsilon;
    row.particles = cell.particles;
    row.median_log_l1 = quantile_sorted(logs, 0.5);
    row.min_log_l1 = logs.front();
    row.max_log_l1 = logs.back();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace pmcmc
