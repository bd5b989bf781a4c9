#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "pmcmc/commands.hpp"
#include "pmcmc/csv.hpp"

using namespace pmcmc;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("pmcmc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

int run_cli(const std::string& args) {
  const char* bin = std::getenv("PMCMC_CLI");
  REQUIRE(bin != nullptr);
  int rc = std::system((std::string(bin) + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}
}  // namespace

TEST_CASE("config round-trips through json") {
  RunConfig cfg;
  cfg.model = "asv";
  cfg.data.synthetic = SyntheticSpec{399, {0.214, 0.931, 0.268, 1.538}, 12};
  cfg.smc.num_particles = 1500;
  cfg.smc.epsilon = 0.1;
  cfg.smc.scheme = SmcScheme::abc;
  cfg.proposal.kind = ProposalKind::qpmh2;
  cfg.proposal.memory = 77;
  cfg.proposal.delta = 250.0;
  cfg.proposal.precond = Eigen::MatrixXd::Identity(4, 4) * 0.3;
  cfg.chain.iterations = 4000;
  cfg.chain.burnin = 1500;
  cfg.chain.theta0 = {0.2, 0.9, 0.3, 1.6};
  cfg.replicates = 3;
  cfg.seed = 99;
  cfg.output_dir = "somewhere";

  std::string text = config_to_json_text(cfg);
  RunConfig back = config_from_json_text(text);
  CHECK(config_to_json_text(back) == text);
  CHECK(back.model == "asv");
  CHECK(back.proposal.memory == 77);
  CHECK(back.smc.scheme == SmcScheme::abc);
  CHECK(back.data.synthetic->T == 399);
  CHECK(back.proposal.precond(2, 2) == 0.3);
}

TEST_CASE("config validation failures") {
  RunConfig cfg;
  cfg.data.synthetic = SyntheticSpec{100, {0.2, 0.8, 1.0}, 1};
  cfg.chain.iterations = 100;
  cfg.chain.burnin = 100;  // must be strictly smaller
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.chain.burnin = 10;
  CHECK_NOTHROW(cfg.validate());
  cfg.data.path = "/definitely/not/here.csv";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.data.path.clear();
  cfg.smc.num_particles = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("returns ingestion applies the log-return formula") {
  fs::path dir = temp_dir("ingest");
  fs::path prices = dir / "prices.csv";
  fs::path out = dir / "returns.csv";

  SUBCASE("flat and rising prices") {
    write_file(prices, "date,price\n2014-01-01,100\n2014-01-02,100\n2014-01-03,110\n");
    CHECK(cmd_ingest(prices.string(), out.string()) == 2);
    NumericTable t = read_csv(out.string());
    auto y = t.column("y");
    CHECK(y[0] == doctest::Approx(0.0));
    CHECK(y[1] == doctest::Approx(100.0 * std::log(1.1)));  // 9.531
  }
  SUBCASE("non-positive price names the row") {
    write_file(prices, "date,price\n2014-01-01,100\n2014-01-02,-3\n");
    try {
      cmd_ingest(prices.string(), out.string());
      FAIL("expected an error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
  }
  SUBCASE("too few rows") {
    write_file(prices, "date,price\n2014-01-01,100\n");
    CHECK_THROWS_AS(cmd_ingest(prices.string(), out.string()), std::runtime_error);
  }
  SUBCASE("header is mandatory") {
    write_file(prices, "2014-01-01,100\n2014-01-02,101\n");
    CHECK_THROWS_AS(cmd_ingest(prices.string(), out.string()), std::runtime_error);
  }
}

TEST_CASE("synthetic datasets are deterministic under the seed") {
  fs::path dir = temp_dir("simulate");
  RunConfig cfg;
  cfg.model = "lgss";
  cfg.data.synthetic = SyntheticSpec{250, {0.2, 0.8, 1.0}, 41};
  cfg.output_dir = (dir / "a").string();
  std::string p1 = cmd_simulate(cfg);
  cfg.output_dir = (dir / "b").string();
  std::string p2 = cmd_simulate(cfg);
  std::ifstream f1(p1), f2(p2);
  std::string s1((std::istreambuf_iterator<char>(f1)), {});
  std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
  NumericTable t = read_csv(p1);
  CHECK(t.rows.size() == 250);
  REQUIRE(t.columns.size() == 3);

  SUBCASE("empty series gives a header-only file") {
    cfg.data.synthetic->T = 0;
    cfg.output_dir = (dir / "c").string();
    NumericTable empty = read_csv(cmd_simulate(cfg));
    CHECK(empty.rows.empty());
    CHECK(empty.columns == std::vector<std::string>{"t", "x", "y"});
  }
}

TEST_CASE("chain run writes trace, mixing and metadata") {
  fs::path dir = temp_dir("runpmh");
  RunConfig cfg;
  cfg.model = "lgss";
  cfg.data.synthetic = SyntheticSpec{60, {0.2, 0.8, 1.0}, 5};
  cfg.smc.num_particles = 50;
  cfg.smc.scheme = SmcScheme::fully_adapted;
  cfg.smc.lag = 12;
  cfg.proposal.kind = ProposalKind::qpmh2;  // needs no preconditioner
  cfg.proposal.memory = 30;
  cfg.chain.iterations = 300;
  cfg.chain.burnin = 100;
  cfg.seed = 17;
  cfg.output_dir = (dir / "run").string();
  PmhRunSummary s1 = cmd_run_pmh(cfg);
  CHECK(s1.acceptance.size() == 1);
  CHECK(fs::exists(dir / "run/trace.csv"));
  CHECK(fs::exists(dir / "run/mixing.csv"));
  CHECK(fs::exists(dir / "run/mixing.json"));
  CHECK(fs::exists(dir / "run/metadata.json"));
  CHECK(fs::exists(dir / "run/smoothed_state.csv"));

  ChainHistory hist = read_trace_csv((dir / "run/trace.csv").string());
  CHECK(hist.length() == 301);
  CHECK(hist.theta.front().size() == 3);

  SUBCASE("rerunning with the same seed reproduces the trace") {
    cfg.output_dir = (dir / "run2").string();
    cmd_run_pmh(cfg);
    std::ifstream f1(dir / "run/trace.csv"), f2(dir / "run2/trace.csv");
    std::string a((std::istreambuf_iterator<char>(f1)), {});
    std::string b((std::istreambuf_iterator<char>(f2)), {});
    CHECK(a == b);
  }
  SUBCASE("replicates produce the inefficiency table") {
    cfg.replicates = 3;
    cfg.output_dir = (dir / "bench").string();
    PmhRunSummary s = cmd_run_pmh(cfg);
    CHECK(s.acceptance.size() == 3);
    CHECK(fs::exists(dir / "bench/trace_0.csv"));
    CHECK(fs::exists(dir / "bench/trace_2.csv"));
    CHECK(fs::exists(dir / "bench/if_table.csv"));
  }
  SUBCASE("diagnose recomputes mixing from the stored trace") {
    MixingReport rep =
        cmd_diagnose((dir / "run/trace.csv").string(), 100, (dir / "diag").string());
    CHECK(rep.param_names.size() == 3);
    CHECK(fs::exists(dir / "diag/mixing.json"));
  }
}

TEST_CASE("cli exit codes") {
  fs::path dir = temp_dir("cli");
  SUBCASE("success") {
    CHECK(run_cli("simulate --model lgss --seed 3 --out " + (dir / "ok").string()) == 0);
  }
  SUBCASE("config errors exit with 1") {
    fs::path bad = dir / "bad.json";
    write_file(bad, "{\"model\": \"nonsense\"}");
    CHECK(run_cli("run-pmh -c " + bad.string()) == 1);
    CHECK(run_cli("definitely-not-a-subcommand") == 1);
  }
  SUBCASE("runtime errors exit with 2") {
    CHECK(run_cli("ingest " + (dir / "missing.csv").string()) == 2);
    CHECK(run_cli("diagnose " + (dir / "missing_trace.csv").string()) == 2);
  }
  SUBCASE("ingest runs end to end") {
    fs::path prices = dir / "p.csv";
    write_file(prices, "date,price\n2014-01-01,100\n2014-01-02,105\n");
    CHECK(run_cli("ingest " + prices.string() + " -o " + (dir / "r.csv").string()) == 0);
    CHECK(fs::exists(dir / "r.csv"));
  }
}
