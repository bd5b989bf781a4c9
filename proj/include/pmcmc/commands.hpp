#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pmcmc/config.hpp"
#include "pmcmc/diagnostics.hpp"
#include "pmcmc/models.hpp"
#include "pmcmc/pmh.hpp"

namespace pmcmc {

std::unique_ptr<Model> build_model(const RunConfig& cfg);

struct Dataset {
  std::vector<double> y;
  std::vector<double> x;  // latent states when simulated, else empty
  Theta theta_true;       // synthetic generating parameters, else empty
};

// Load the observations from cfg.data.path, or simulate them from the
// synthetic spec under its own seed.
Dataset make_dataset(const RunConfig& cfg, const Model& model);

// Simulate a synthetic dataset and write it as `t,x,y`; returns the path.
std::string cmd_simulate(const RunConfig& cfg);

// Convert a `date,price` series into log-returns y_t = 100*(log s_t - log
// s_{t-1}) written as `t,y`; returns the number of returns.
int cmd_ingest(const std::string& prices_path, const std::string& out_path);

struct SweepOptions {
  std::vector<double> epsilon_grid = {0.01, 0.05, 0.1, 0.5, 1.0, 2.0, 5.0};
  int replicates = 20;
  int reference_particles = 50;  // plain-filter reference line
};

// Tolerance sweep against the exact filter reference (lgss only): per
// (epsilon, replicate) one perturbed filter run, errors measured against the
// exact log-likelihood and log-posterior gradient. epsilon = 0 rows are the
// plain fully adapted filter. Writes sweep_raw.csv and sweep_summary.csv.
std::vector<SweepRow> cmd_sweep_epsilon(const RunConfig& cfg,
                                        const SweepOptions& opt);

struct PmhRunSummary {
  std::vector<double> acceptance;          // per replicate
  std::vector<std::string> trace_paths;    // per replicate
  PosteriorSummary pooled_summary;         // over all replicates
  double wall_seconds = 0.0;
};

// Run the chain (replicates fan out over worker threads, one stream each);
// writes trace CSVs, mixing reports, run metadata, the smoothed state export
// and, for multiple replicates, a median/IQR inefficiency table.
PmhRunSummary cmd_run_pmh(const RunConfig& cfg);

// Recompute the mixing report from a stored trace CSV.
MixingReport cmd_diagnose(const std::string& trace_path, int burnin,
                          const std::string& out_dir);

// PMH0 pilot estimate of the preconditioner: short run with a small isotropic
// step, post-burn-in covariance shrunk 10% toward its diagonal; the returned
// matrix is P (the inverse of the estimated covariance).
Eigen::MatrixXd pilot_preconditioner(RngStream& rng, const Target& target,
                                     const Theta& theta0, int iterations = 5000,
                                     int burnin = 1000);

void write_trace_csv(const std::string& path, const ChainHistory& hist);
ChainHistory read_trace_csv(const std::string& path);
void write_mixing_report(const MixingReport& rep, const std::string& csv_path,
                         const std::string& json_path);

}  // namespace pmcmc
