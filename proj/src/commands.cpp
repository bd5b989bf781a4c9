#include "pmcmc/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <mutex>

#include "pmcmc/csv.hpp"
#include "pmcmc/kalman.hpp"
#include "pmcmc/parallel.hpp"

namespace pmcmc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Theta to_theta(const std::vector<double>& v) {
  Theta t(v.size());
  for (size_t i = 0; i < v.size(); ++i) t[i] = v[i];
  return t;
}

Theta resolve_theta0(const RunConfig& cfg, const Dataset& data, const Model& model) {
  if (!cfg.chain.theta0.empty()) {
    Theta t = to_theta(cfg.chain.theta0);
    if (t.size() != model.dim())
      throw ConfigError("theta0 has the wrong dimension");
    return t;
  }
  if (data.theta_true.size() == model.dim()) return data.theta_true;
  throw ConfigError("theta0 is required when the data are not synthetic");
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return (fs::path(cfg.output_dir) / name).string();
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double iqr_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    double h = (v.size() - 1) * p;
    size_t lo = static_cast<size_t>(h);
    size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - lo) * (v[hi] - v[lo]);
  };
  return q(0.75) - q(0.25);
}

}  // namespace

std::unique_ptr<Model> build_model(const RunConfig& cfg) {
  if (cfg.model == "lgss") return lgss_model(cfg.sigma_e);
  if (cfg.model == "asv") return asv_model();
  throw ConfigError("unknown model '" + cfg.model + "'");
}

Dataset make_dataset(const RunConfig& cfg, const Model& model) {
  Dataset out;
  if (!cfg.data.path.empty()) {
    NumericTable table = read_csv(cfg.data.path);
    out.y = table.column("y");
    if (table.column_index("x") >= 0) out.x = table.column("x");
    return out;
  }
  if (!cfg.data.synthetic) throw ConfigError("no data source configured");
  const SyntheticSpec& spec = *cfg.data.synthetic;
  if (static_cast<int>(spec.theta_true.size()) != model.dim())
    throw ConfigError("theta_true has the wrong dimension");
  out.theta_true = to_theta(spec.theta_true);
  RngStream rng(spec.seed, 0x5157u);
  double x = model.sample_initial(out.theta_true, rng);
  out.x.reserve(spec.T);
  out.y.reserve(spec.T);
  for (int t = 1; t <= spec.T; ++t) {
    x = model.sample_transition(out.theta_true, x, rng);
    out.x.push_back(x);
    out.y.push_back(model.sample_observation(out.theta_true, x, rng));
  }
  return out;
}

std::string cmd_simulate(const RunConfig& cfg) {
  if (!cfg.data.synthetic) throw ConfigError("simulate needs a synthetic spec");
  auto model = build_model(cfg);
  Dataset data = make_dataset(cfg, *model);
  std::vector<std::vector<double>> rows;
  for (size_t t = 0; t < data.y.size(); ++t)
    rows.push_back({static_cast<double>(t + 1), data.x[t], data.y[t]});
  std::string path = out_path(cfg, "dataset.csv");
  write_csv(path, {"t", "x", "y"}, rows);
  return path;
}

int cmd_ingest(const std::string& prices_path, const std::string& out_file) {
  PriceSeries prices = read_price_csv(prices_path);
  if (prices.prices.size() < 2)
    throw std::runtime_error("ingest: need at least two price rows");
  std::vector<std::vector<double>> rows;
  for (size_t t = 1; t < prices.prices.size(); ++t) {
    double r = 100.0 * (std::log(prices.prices[t]) - std::log(prices.prices[t - 1]));
    rows.push_back({static_cast<double>(t), r});
  }
  write_csv(out_file, {"t", "y"}, rows);
  return static_cast<int>(rows.size());
}

std::vector<SweepRow> cmd_sweep_epsilon(const RunConfig& cfg,
                                        const SweepOptions& opt) {
  if (cfg.model != "lgss")
    throw ConfigError("sweep-epsilon needs the lgss model (exact reference)");
  auto model = build_model(cfg);
  Dataset data = make_dataset(cfg, *model);
  Theta theta = resolve_theta0(cfg, data, *model);

  Eigen::Vector3d th3(theta[0], theta[1], theta[2]);
  KalmanResult exact = kalman_filter_smoother(th3, data.y, cfg.sigma_e);
  Eigen::VectorXd grad_true =
      exact.score + model->grad_log_prior(theta);  // log-posterior score

  std::vector<double> grid = opt.epsilon_grid;
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end())
    grid.push_back(0.0);  // plain-filter reference line
  std::sort(grid.begin(), grid.end());

  const std::vector<std::string> quantities = {"loglik", "grad_mu", "grad_phi",
                                               "grad_sigma_v"};
  const int R = opt.replicates;
  const int E = static_cast<int>(grid.size());
  // errors[e][q][r]
  std::vector<std::vector<std::vector<double>>> errors(
      E, std::vector<std::vector<double>>(4, std::vector<double>(R)));

  RngStream master(cfg.seed, 0xABC0u);
  parallel_for(E * R, [&](int idx) {
    int e = idx / R, r = idx % R;
    double eps = grid[e];
    RngStream rng = master.substream(idx);
    double ll;
    Eigen::VectorXd grad;
    if (eps == 0.0) {
      SmcConfig scfg;
      scfg.num_particles = opt.reference_particles;
      scfg.scheme = SmcScheme::fully_adapted;
      scfg.lag = cfg.smc.lag;
      auto [ps, est] = run_smc(rng, *model, data.y, theta, scfg);
      ll = est.loglik_hat;
      grad = est.grad_hat;
    } else {
      PerturbedDataset pdata = perturb_dataset(rng, data.y, *model, eps);
      SmcConfig scfg = cfg.smc;
      scfg.scheme = SmcScheme::abc;
      scfg.epsilon = eps;
      auto [ps, est] = run_smc_abc(rng, *model, pdata, theta, scfg);
      ll = est.loglik_hat;
      grad = est.grad_hat;
    }
    errors[e][0][r] = std::abs(ll - exact.loglik);
    for (int j = 0; j < 3; ++j)
      errors[e][1 + j][r] = std::abs(grad[j] - grad_true[j]);
  });

  std::vector<SweepCell> cells;
  std::vector<std::vector<double>> raw_rows;
  for (int e = 0; e < E; ++e) {
    int particles =
        grid[e] == 0.0 ? opt.reference_particles : cfg.smc.num_particles;
    for (int q = 0; q < 4; ++q) {
      cells.push_back({quantities[q], grid[e], particles, errors[e][q]});
      for (int r = 0; r < R; ++r)
        raw_rows.push_back({static_cast<double>(q), grid[e],
                            static_cast<double>(r), errors[e][q][r]});
    }
  }
  auto rows = epsilon_sweep_report(cells);

  write_csv(out_path(cfg, "sweep_raw.csv"),
            {"quantity_index", "epsilon", "replicate", "abs_error"}, raw_rows);
  std::vector<std::vector<double>> summary_rows;
  for (const auto& row : rows) {
    double qidx = std::find(quantities.begin(), quantities.end(), row.quantity) -
                  quantities.begin();
    summary_rows.push_back({qidx, row.epsilon, static_cast<double>(row.particles),
                            row.median_log_l1, row.min_log_l1, row.max_log_l1});
  }
  write_csv(out_path(cfg, "sweep_summary.csv"),
            {"quantity_index", "epsilon", "particles", "median_log_l1",
             "min_log_l1", "max_log_l1"},
            summary_rows);
  return rows;
}

Eigen::MatrixXd pilot_preconditioner(RngStream& rng, const Target& target,
                                     const Theta& theta0, int iterations,
                                     int burnin) {
  const int p = target.dim();
  ProposalSpec pilot;
  pilot.kind = ProposalKind::pmh0;
  pilot.step = 0.01;  // isotropic 0.01^2 covariance
  pilot.precond = Eigen::MatrixXd::Identity(p, p);
  ChainHistory hist = run_pmh(rng, target, pilot, iterations, burnin, theta0);

  int n = hist.length() - (burnin + 1);
  Eigen::MatrixXd samples(n, p);
  for (int i = 0; i < n; ++i)
    samples.row(i) = hist.theta[burnin + 1 + i].transpose();
  Eigen::RowVectorXd mean = samples.colwise().mean();
  samples.rowwise() -= mean;
  Eigen::MatrixXd cov = samples.transpose() * samples / std::max(1, n - 1);
  // Shrink 10% toward the diagonal and guard against a stuck pilot.
  Eigen::MatrixXd shrunk =
      0.9 * cov + 0.1 * cov.diagonal().asDiagonal().toDenseMatrix();
  shrunk += 1e-10 * Eigen::MatrixXd::Identity(p, p);
  Eigen::LLT<Eigen::MatrixXd> llt(shrunk);
  if (llt.info() != Eigen::Success)
    return Eigen::MatrixXd::Identity(p, p);
  return llt.solve(Eigen::MatrixXd::Identity(p, p));
}

void write_trace_csv(const std::string& path, const ChainHistory& hist) {
  std::vector<std::string> cols = {"k"};
  int p = static_cast<int>(hist.theta.front().size());
  for (int j = 1; j <= p; ++j) cols.push_back("theta_" + std::to_string(j));
  cols.push_back("loglik");
  cols.push_back("accepted");
  std::vector<std::vector<double>> rows;
  rows.reserve(hist.length());
  for (int k = 0; k < hist.length(); ++k) {
    std::vector<double> row = {static_cast<double>(k)};
    for (int j = 0; j < p; ++j) row.push_back(hist.theta[k][j]);
    row.push_back(hist.loglik[k]);
    row.push_back(hist.accepted[k] ? 1.0 : 0.0);
    rows.push_back(std::move(row));
  }
  write_csv(path, cols, rows);
}

ChainHistory read_trace_csv(const std::string& path) {
  NumericTable table = read_csv(path);
  int p = 0;
  while (table.column_index("theta_" + std::to_string(p + 1)) >= 0) ++p;
  if (p == 0) throw std::runtime_error("trace: no theta_* columns in " + path);
  ChainHistory hist;
  auto loglik = table.column("loglik");
  auto accepted = table.column("accepted");
  std::vector<std::vector<double>> comps(p);
  for (int j = 0; j < p; ++j)
    comps[j] = table.column("theta_" + std::to_string(j + 1));
  for (size_t k = 0; k < loglik.size(); ++k) {
    Theta t(p);
    for (int j = 0; j < p; ++j) t[j] = comps[j][k];
    hist.theta.push_back(t);
    hist.loglik.push_back(loglik[k]);
    hist.logprior.push_back(0.0);
    hist.grad.push_back(Eigen::VectorXd::Zero(p));
    hist.accepted.push_back(accepted[k] != 0.0 ? 1 : 0);
  }
  return hist;
}

void write_mixing_report(const MixingReport& rep, const std::string& csv_path,
                         const std::string& json_path) {
  std::vector<std::vector<double>> rows;
  for (size_t j = 0; j < rep.param_names.size(); ++j) {
    const auto& s = rep.summary.params[j];
    rows.push_back({static_cast<double>(j + 1), rep.if_adapted[j],
                    static_cast<double>(rep.adapted_lag[j]), rep.if_fixed[j],
                    rep.acceptance, s.mean, s.sd, s.q025, s.q500, s.q975});
  }
  write_csv(csv_path,
            {"param", "if_adapted", "adapted_lag", "if_fixed", "acceptance",
             "mean", "sd", "q025", "q500", "q975"},
            rows);

  json j;
  j["acceptance"] = rep.acceptance;
  j["n_samples"] = rep.summary.n;
  for (size_t jp = 0; jp < rep.param_names.size(); ++jp) {
    json pj;
    pj["name"] = rep.param_names[jp];
    pj["if_adapted"] = rep.if_adapted[jp];
    pj["adapted_lag"] = rep.adapted_lag[jp];
    pj["if_fixed"] = rep.if_fixed[jp];
    const auto& s = rep.summary.params[jp];
    pj["mean"] = s.mean;
    pj["sd"] = s.sd;
    pj["q025"] = s.q025;
    pj["q500"] = s.q500;
    pj["q975"] = s.q975;
    pj["acf"] = rep.acf[jp];
    j["params"].push_back(pj);
  }
  std::ofstream f(json_path);
  f << j.dump(2) << "\n";
}

PmhRunSummary cmd_run_pmh(const RunConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  cfg.validate();
  auto model = build_model(cfg);
  Dataset data = make_dataset(cfg, *model);
  Theta theta0 = resolve_theta0(cfg, data, *model);

  RngStream master(cfg.seed, 0x9417u);

  // Frozen perturbation for the likelihood-free scheme: one draw per run.
  std::unique_ptr<ParticleTarget> target;
  PerturbedDataset pdata;
  if (cfg.smc.scheme == SmcScheme::abc) {
    RngStream perturb_rng = master.substream(1);
    pdata = perturb_dataset(perturb_rng, data.y, *model, cfg.smc.epsilon);
    target = std::make_unique<ParticleTarget>(*model, pdata, cfg.smc);
  } else {
    target = std::make_unique<ParticleTarget>(*model, data.y, cfg.smc);
  }

  ProposalSpec spec = cfg.proposal;
  bool needs_precond = (spec.kind == ProposalKind::pmh0 ||
                        spec.kind == ProposalKind::pmh1) &&
                       spec.precond.size() == 0;
  if (needs_precond) {
    RngStream pilot_rng = master.substream(2);
    spec.precond = pilot_preconditioner(pilot_rng, *target, theta0);
  }

  const int R = cfg.replicates;
  std::vector<ChainHistory> chains(R);
  parallel_for(R, [&](int r) {
    RngStream rng = master.substream(100 + r);
    chains[r] = run_pmh(rng, *target, spec, cfg.chain.iterations,
                        cfg.chain.burnin, theta0);
  });

  PmhRunSummary summary;
  const int p = model->dim();
  auto names = model->param_names();
  std::vector<std::vector<double>> pooled(p);
  for (int r = 0; r < R; ++r) {
    std::string suffix = R > 1 ? "_" + std::to_string(r) : "";
    std::string trace_path = out_path(cfg, "trace" + suffix + ".csv");
    write_trace_csv(trace_path, chains[r]);
    summary.trace_paths.push_back(trace_path);
    summary.acceptance.push_back(chains[r].acceptance_rate(cfg.chain.burnin));

    std::vector<std::vector<double>> comps(p);
    for (int j = 0; j < p; ++j) {
      comps[j] = {chains[r].theta.front()[j]};
      auto tail = chains[r].component(j, 0);
      comps[j].insert(comps[j].end(), tail.begin(), tail.end());
      pooled[j].insert(pooled[j].end(), comps[j].begin() + cfg.chain.burnin + 1,
                       comps[j].end());
    }
    MixingReport rep = mixing_report(comps, summary.acceptance.back(),
                                     cfg.chain.burnin, 250, names);
    write_mixing_report(rep, out_path(cfg, "mixing" + suffix + ".csv"),
                        out_path(cfg, "mixing" + suffix + ".json"));
  }
  summary.pooled_summary = posterior_summary(pooled, -1, names);

  // Median/IQR inefficiency table across replicates (min/max over params).
  if (R > 1) {
    std::vector<double> min_ad, max_ad, min_fx, max_fx, accs;
    for (int r = 0; r < R; ++r) {
      std::vector<double> ad, fx;
      for (int j = 0; j < p; ++j) {
        std::vector<double> x = chains[r].component(j, cfg.chain.burnin);
        ad.push_back(inefficiency_factor(x, {.adapted = true}).value);
        fx.push_back(
            inefficiency_factor(x, {.adapted = false, .fixed_lag = 1000}).value);
      }
      min_ad.push_back(*std::min_element(ad.begin(), ad.end()));
      max_ad.push_back(*std::max_element(ad.begin(), ad.end()));
      min_fx.push_back(*std::min_element(fx.begin(), fx.end()));
      max_fx.push_back(*std::max_element(fx.begin(), fx.end()));
      accs.push_back(summary.acceptance[r]);
    }
    std::vector<std::vector<double>> rows = {
        {0.0, median_of(accs), median_of(min_ad), iqr_of(min_ad),
         median_of(max_ad), iqr_of(max_ad)},
        {1.0, median_of(accs), median_of(min_fx), iqr_of(min_fx),
         median_of(max_fx), iqr_of(max_fx)}};
    write_csv(out_path(cfg, "if_table.csv"),
              {"rule_fixed", "acceptance_median", "min_if_median", "min_if_iqr",
               "max_if_median", "max_if_iqr"},
              rows);
  }

  // Smoothed state export at the pooled posterior mean.
  Theta theta_hat(p);
  for (int j = 0; j < p; ++j) theta_hat[j] = summary.pooled_summary.params[j].mean;
  if (model->in_support(theta_hat)) {
    RngStream rng = master.substream(7);
    SmcConfig scfg = cfg.smc;
    scfg.compute_gradient = false;
    std::vector<double> means;
    if (cfg.smc.scheme == SmcScheme::abc) {
      auto [ps, est] = run_smc_abc(rng, *model, pdata, theta_hat, scfg);
      if (!ps.degenerate_t) means = fixed_lag_smoothed_means(ps, scfg.lag);
    } else {
      auto [ps, est] = run_smc(rng, *model, data.y, theta_hat, scfg);
      if (!ps.degenerate_t) means = fixed_lag_smoothed_means(ps, scfg.lag);
    }
    if (!means.empty()) {
      std::vector<std::vector<double>> rows;
      for (size_t t = 0; t < means.size(); ++t)
        rows.push_back({static_cast<double>(t), means[t]});
      write_csv(out_path(cfg, "smoothed_state.csv"), {"t", "x_smoothed"}, rows);
    }
  }

  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  json meta;
  meta["settings"] = json::parse(config_to_json_text(cfg));
  meta["seed"] = cfg.seed;
  meta["acceptance"] = summary.acceptance;
  meta["wall_seconds"] = summary.wall_seconds;
  meta["degeneracy_warnings"] = 0;
  for (const auto& c : chains)
    meta["degeneracy_warnings"] =
        meta["degeneracy_warnings"].get<int>() + c.degeneracy_warning_count;
  std::ofstream mf(out_path(cfg, "metadata.json"));
  mf << meta.dump(2) << "\n";

  return summary;
}

MixingReport cmd_diagnose(const std::string& trace_path, int burnin,
                          const std::string& out_dir) {
  ChainHistory hist = read_trace_csv(trace_path);
  if (hist.length() <= burnin + 1)
    throw std::runtime_error("diagnose: trace shorter than burn-in");
  int p = static_cast<int>(hist.theta.front().size());
  std::vector<std::vector<double>> comps(p);
  for (int j = 0; j < p; ++j) {
    comps[j] = {hist.theta.front()[j]};
    auto tail = hist.component(j, 0);
    comps[j].insert(comps[j].end(), tail.begin(), tail.end());
  }
  MixingReport rep =
      mixing_report(comps, hist.acceptance_rate(burnin), burnin, 250);
  fs::create_directories(out_dir);
  write_mixing_report(rep, (fs::path(out_dir) / "mixing.csv").string(),
                      (fs::path(out_dir) / "mixing.json").string());
  return rep;
}

}  // namespace pmcmc
