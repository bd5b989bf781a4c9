#include "pmcmc/config.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace pmcmc {

using nlohmann::json;

std::string to_string(ProposalKind kind) {
  switch (kind) {
    case ProposalKind::pmh0: return "pmh0";
    case ProposalKind::pmh1: return "pmh1";
    case ProposalKind::pmh2: return "pmh2";
    case ProposalKind::qpmh2: return "qpmh2";
  }
  return "pmh0";
}

ProposalKind proposal_kind_from_string(const std::string& s) {
  if (s == "pmh0") return ProposalKind::pmh0;
  if (s == "pmh1") return ProposalKind::pmh1;
  if (s == "pmh2") return ProposalKind::pmh2;
  if (s == "qpmh2") return ProposalKind::qpmh2;
  throw ConfigError("unknown proposal kind '" + s + "'");
}

std::string to_string(SmcScheme scheme) {
  switch (scheme) {
    case SmcScheme::bootstrap: return "bootstrap";
    case SmcScheme::fully_adapted: return "fully_adapted";
    case SmcScheme::abc: return "abc";
  }
  return "bootstrap";
}

SmcScheme smc_scheme_from_string(const std::string& s) {
  if (s == "bootstrap") return SmcScheme::bootstrap;
  if (s == "fully_adapted") return SmcScheme::fully_adapted;
  if (s == "abc") return SmcScheme::abc;
  throw ConfigError("unknown filter scheme '" + s + "'");
}

void RunConfig::validate() const {
  if (model != "lgss" && model != "asv")
    throw ConfigError("model must be 'lgss' or 'asv'");
  if (!(sigma_e > 0.0)) throw ConfigError("sigma_e must be positive");
  if (chain.iterations <= chain.burnin || chain.burnin < 0)
    throw ConfigError("need iterations > burnin >= 0");
  if (smc.num_particles < 2) throw ConfigError("need at least two particles");
  if (smc.scheme == SmcScheme::abc && !(smc.epsilon > 0.0))
    throw ConfigError("the perturbed scheme needs epsilon > 0");
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (!data.path.empty() && !std::filesystem::exists(data.path))
    throw ConfigError("data path '" + data.path + "' does not exist");
  if (data.path.empty() && !data.synthetic)
    throw ConfigError("either a data path or a synthetic spec is required");
}

RunConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig cfg;
  try {
    cfg.model = j.value("model", cfg.model);
    cfg.sigma_e = j.value("sigma_e", cfg.sigma_e);
    if (j.contains("data")) {
      const auto& d = j["data"];
      cfg.data.path = d.value("path", std::string{});
      if (d.contains("synthetic")) {
        const auto& s = d["synthetic"];
        SyntheticSpec spec;
        spec.T = s.value("T", spec.T);
        spec.theta_true = s.value("theta_true", std::vector<double>{});
        spec.seed = s.value("seed", spec.seed);
        cfg.data.synthetic = spec;
      }
    }
    if (j.contains("smc")) {
      const auto& s = j["smc"];
      cfg.smc.num_particles = s.value("particles", cfg.smc.num_particles);
      cfg.smc.epsilon = s.value("epsilon", cfg.smc.epsilon);
      cfg.smc.lag = s.value("lag", cfg.smc.lag);
      cfg.smc.scheme =
          smc_scheme_from_string(s.value("scheme", to_string(cfg.smc.scheme)));
    }
    if (j.contains("proposal")) {
      const auto& p = j["proposal"];
      cfg.proposal.kind =
          proposal_kind_from_string(p.value("kind", to_string(cfg.proposal.kind)));
      cfg.proposal.step = p.value("step", cfg.proposal.step);
      cfg.proposal.memory = p.value("memory", cfg.proposal.memory);
      cfg.proposal.delta = p.value("delta", cfg.proposal.delta);
      cfg.proposal.hybrid_samples =
          p.value("hybrid_samples", cfg.proposal.hybrid_samples);
      if (p.contains("precond")) {
        auto rows = p["precond"].get<std::vector<std::vector<double>>>();
        int n = static_cast<int>(rows.size());
        Eigen::MatrixXd m(n, n);
        for (int r = 0; r < n; ++r) {
          if (static_cast<int>(rows[r].size()) != n)
            throw ConfigError("precond must be a square matrix");
          for (int c = 0; c < n; ++c) m(r, c) = rows[r][c];
        }
        cfg.proposal.precond = m;
      }
    }
    if (j.contains("chain")) {
      const auto& c = j["chain"];
      cfg.chain.iterations = c.value("iterations", cfg.chain.iterations);
      cfg.chain.burnin = c.value("burnin", cfg.chain.burnin);
      cfg.chain.theta0 = c.value("theta0", std::vector<double>{});
    }
    cfg.replicates = j.value("replicates", cfg.replicates);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const RunConfig& cfg) {
  json j;
  j["model"] = cfg.model;
  j["sigma_e"] = cfg.sigma_e;
  json d;
  if (!cfg.data.path.empty()) d["path"] = cfg.data.path;
  if (cfg.data.synthetic) {
    d["synthetic"] = {{"T", cfg.data.synthetic->T},
                      {"theta_true", cfg.data.synthetic->theta_true},
                      {"seed", cfg.data.synthetic->seed}};
  }
  j["data"] = d;
  j["smc"] = {{"particles", cfg.smc.num_particles},
              {"epsilon", cfg.smc.epsilon},
              {"lag", cfg.smc.lag},
              {"scheme", to_string(cfg.smc.scheme)}};
  json p = {{"kind", to_string(cfg.proposal.kind)},
            {"step", cfg.proposal.step},
            {"memory", cfg.proposal.memory},
            {"delta", cfg.proposal.delta},
            {"hybrid_samples", cfg.proposal.hybrid_samples}};
  if (cfg.proposal.precond.size() != 0) {
    std::vector<std::vector<double>> rows;
    for (int r = 0; r < cfg.proposal.precond.rows(); ++r) {
      std::vector<double> row;
      for (int c = 0; c < cfg.proposal.precond.cols(); ++c)
        row.push_back(cfg.proposal.precond(r, c));
      rows.push_back(std::move(row));
    }
    p["precond"] = rows;
  }
  j["proposal"] = p;
  j["chain"] = {{"iterations", cfg.chain.iterations},
                {"burnin", cfg.chain.burnin},
                {"theta0", cfg.chain.theta0}};
  j["replicates"] = cfg.replicates;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2);
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write config '" + path + "'");
  f << config_to_json_text(cfg) << "\n";
}

}  // namespace pmcmc
