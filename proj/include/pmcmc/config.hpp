#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmcmc/pmh.hpp"
#include "pmcmc/smc.hpp"

namespace pmcmc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SyntheticSpec {
  int T = 250;
  std::vector<double> theta_true;
  std::uint64_t seed = 1;
};

struct DataSpec {
  std::string path;  // empty when synthetic
  std::optional<SyntheticSpec> synthetic;
};

struct ChainSpec {
  int iterations = 15000;
  int burnin = 5000;
  std::vector<double> theta0;  // empty: synthetic truth when available
};

struct RunConfig {
  std::string model = "lgss";  // lgss | asv
  double sigma_e = 0.1;        // lgss observation noise
  DataSpec data;
  SmcConfig smc;
  ProposalSpec proposal;
  ChainSpec chain;
  int replicates = 1;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  // Structural checks: known model, K > K_b >= 0, particle count >= 2,
  // referenced data paths exist.
  void validate() const;
};

RunConfig config_from_json_text(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_to_json_text(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

std::string to_string(ProposalKind kind);
ProposalKind proposal_kind_from_string(const std::string& s);
std::string to_string(SmcScheme scheme);
SmcScheme smc_scheme_from_string(const std::string& s);

}  // namespace pmcmc
