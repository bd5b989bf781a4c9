#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmcmc/commands.hpp"
#include "pmcmc/diagnostics.hpp"
#include "pmcmc/kalman.hpp"
#include "pmcmc/models.hpp"
#include "pmcmc/pmh.hpp"
#include "pmcmc/smc.hpp"
#include "pmcmc/stable.hpp"

namespace py = pybind11;
using namespace pmcmc;

namespace {

std::unique_ptr<Model> model_by_name(const std::string& name, double sigma_e) {
  if (name == "lgss") return lgss_model(sigma_e);
  if (name == "asv") return asv_model();
  throw std::invalid_argument("model must be 'lgss' or 'asv'");
}

SmcConfig make_smc_config(int particles, const std::string& scheme, double epsilon,
                          int lag) {
  SmcConfig cfg;
  cfg.num_particles = particles;
  cfg.scheme = smc_scheme_from_string(scheme);
  cfg.epsilon = epsilon;
  cfg.lag = lag;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Particle Metropolis-Hastings inference for state space models";

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
           py::arg("stream_id") = 0)
      .def("uniform", [](RngStream& r) { return r.uniform(); })
      .def("gaussian", &RngStream::gaussian, py::arg("mean") = 0.0,
           py::arg("sd") = 1.0)
      .def("substream", &RngStream::substream);

  m.def(
      "sample_stable",
      [](std::uint64_t seed, int n, double alpha, double beta, double c,
         double mu) {
        RngStream rng(seed);
        StableParams p(alpha, beta, c, mu);
        std::vector<double> out(n);
        for (auto& v : out) v = sample_stable(rng, p);
        return out;
      },
      py::arg("seed"), py::arg("n"), py::arg("alpha"), py::arg("beta") = 0.0,
      py::arg("c") = 1.0, py::arg("mu") = 0.0,
      "Draw alpha-stable variates via the CMS transform");

  m.def(
      "simulate",
      [](const std::string& model, std::uint64_t seed, int T,
         const Eigen::VectorXd& theta, double sigma_e) {
        auto mod = model_by_name(model, sigma_e);
        RngStream rng(seed, 0x5157u);
        std::vector<double> xs, ys;
        double x = mod->sample_initial(theta, rng);
        for (int t = 1; t <= T; ++t) {
          x = mod->sample_transition(theta, x, rng);
          xs.push_back(x);
          ys.push_back(mod->sample_observation(theta, x, rng));
        }
        return py::make_tuple(xs, ys);
      },
      py::arg("model"), py::arg("seed"), py::arg("T"), py::arg("theta"),
      py::arg("sigma_e") = 0.1, "Simulate (states, observations) from a model");

  m.def(
      "kalman",
      [](const Eigen::Vector3d& theta, const std::vector<double>& y,
         double sigma_e) {
        KalmanResult res = kalman_filter_smoother(theta, y, sigma_e);
        py::dict out;
        out["loglik"] = res.loglik;
        out["score"] = res.score;
        out["filtered_mean"] = res.filtered_mean;
        out["smoothed_mean"] = res.smoothed_mean;
        return out;
      },
      py::arg("theta"), py::arg("y"), py::arg("sigma_e") = 0.1,
      "Exact log-likelihood and score of the linear Gaussian model");

  m.def(
      "smc",
      [](const std::string& model, std::uint64_t seed,
         const std::vector<double>& y, const Eigen::VectorXd& theta,
         int particles, const std::string& scheme, double epsilon, int lag,
         double sigma_e) {
        auto mod = model_by_name(model, sigma_e);
        SmcConfig cfg = make_smc_config(particles, scheme, epsilon, lag);
        RngStream rng(seed);
        PosteriorEstimate est;
        if (cfg.scheme == SmcScheme::abc) {
          RngStream prng = rng.substream(1);
          PerturbedDataset data = perturb_dataset(prng, y, *mod, epsilon);
          est = run_smc_abc(rng, *mod, data, theta, cfg).second;
        } else {
          est = run_smc(rng, *mod, y, theta, cfg).second;
        }
        py::dict out;
        out["loglik"] = est.loglik_hat;
        out["logprior"] = est.logprior;
        out["grad"] = est.grad_hat;
        out["degenerate"] = est.degenerate_t.has_value();
        return out;
      },
      py::arg("model"), py::arg("seed"), py::arg("y"), py::arg("theta"),
      py::arg("particles") = 100, py::arg("scheme") = "bootstrap",
      py::arg("epsilon") = 0.0, py::arg("lag") = 12, py::arg("sigma_e") = 0.1,
      "One particle filter pass: likelihood and gradient estimates");

  m.def(
      "run_pmh",
      [](const std::string& model, std::uint64_t seed,
         const std::vector<double>& y, const Eigen::VectorXd& theta0,
         int iterations, int burnin, const std::string& proposal, int particles,
         const std::string& scheme, double epsilon, int lag, int memory,
         double delta, double sigma_e, double step) {
        auto mod = model_by_name(model, sigma_e);
        SmcConfig cfg = make_smc_config(particles, scheme, epsilon, lag);
        RngStream rng(seed);
        std::unique_ptr<ParticleTarget> target;
        if (cfg.scheme == SmcScheme::abc) {
          RngStream prng = rng.substream(1);
          target = std::make_unique<ParticleTarget>(
              *mod, perturb_dataset(prng, y, *mod, epsilon), cfg);
        } else {
          target = std::make_unique<ParticleTarget>(*mod, y, cfg);
        }
        ProposalSpec spec;
        spec.kind = proposal_kind_from_string(proposal);
        spec.memory = memory;
        spec.delta = delta;
        spec.step = step;
        ChainHistory hist =
            run_pmh(rng, *target, spec, iterations, burnin, theta0);
        const int K = hist.length();
        const int p = mod->dim();
        Eigen::MatrixXd trace(K, p);
        for (int k = 0; k < K; ++k) trace.row(k) = hist.theta[k].transpose();
        py::dict out;
        out["trace"] = trace;
        out["loglik"] = hist.loglik;
        out["accepted"] = hist.accepted;
        out["acceptance"] = hist.acceptance_rate(burnin);
        return out;
      },
      py::arg("model"), py::arg("seed"), py::arg("y"), py::arg("theta0"),
      py::arg("iterations") = 1000, py::arg("burnin") = 0,
      py::arg("proposal") = "pmh0", py::arg("particles") = 100,
      py::arg("scheme") = "bootstrap", py::arg("epsilon") = 0.0,
      py::arg("lag") = 12, py::arg("memory") = 100, py::arg("delta") = 1000.0,
      py::arg("sigma_e") = 0.1, py::arg("step") = 0.0,
      "Run the particle Metropolis-Hastings chain");

  m.def(
      "autocorrelation",
      [](const std::vector<double>& series, int max_lag) {
        return autocorrelation(series, max_lag).rho;
      },
      py::arg("series"), py::arg("max_lag"));

  m.def(
      "inefficiency_factor",
      [](const std::vector<double>& series, bool adapted, int fixed_lag) {
        return inefficiency_factor(series, {adapted, fixed_lag}).value;
      },
      py::arg("series"), py::arg("adapted") = true, py::arg("fixed_lag") = 1000);

  m.def(
      "posterior_summary",
      [](const std::vector<std::vector<double>>& trace_by_param, int burnin) {
        PosteriorSummary s = posterior_summary(trace_by_param, burnin);
        py::list out;
        for (const auto& pr : s.params) {
          py::dict d;
          d["name"] = pr.name;
          d["mean"] = pr.mean;
          d["sd"] = pr.sd;
          d["q025"] = pr.q025;
          d["q500"] = pr.q500;
          d["q975"] = pr.q975;
          out.append(d);
        }
        return out;
      },
      py::arg("trace_by_param"), py::arg("burnin") = -1);
}
