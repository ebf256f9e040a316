// ucgap: trend-cycle decomposition of quarterly output by adaptive MCMC.
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>

#include "ucgap/errors.hpp"
#include "ucgap/estimate.hpp"

namespace {

using namespace ucgap;

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 1;

int report(const char* kind, const std::string& message, int code) {
  const nlohmann::json j{{"error", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
  return code;
}

LambdaScale parse_lambda_scale(const std::string& s) {
  if (s == "pi") return LambdaScale::Pi;
  if (s == "2pi") return LambdaScale::TwoPi;
  throw ValidationError("--lambda-scale must be 'pi' or '2pi'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian trend-cycle decomposition of quarterly output and inflation"};
  app.require_subcommand(1);

  // estimate
  auto* est = app.add_subcommand("estimate", "Run the sampler and write draws and summaries");
  std::string config_path, spec_name, gdp, cpi, out_dir, lambda_scale;
  std::uint64_t iters = 0, burnin = 0, thin = 0, seed = 0;
  double C = 0.0, kappa = 0.0, level = 0.0;
  unsigned chains = 0;
  std::size_t max_paths = 0;
  bool init_prior_draw = false, no_adapt = false;
  est->add_option("--config", config_path, "JSON run configuration or a previous manifest.json");
  est->add_option("--spec", spec_name, "Model: uni|biv - ll|lld|lt|irw, e.g. uni-lt");
  est->add_option("--gdp", gdp, "GDP levels CSV (date,value)");
  est->add_option("--cpi", cpi, "CPI levels CSV (bivariate models)");
  est->add_option("--out", out_dir, "Output directory");
  est->add_option("--iters", iters, "Total iterations including burn-in");
  est->add_option("--burnin", burnin, "Burn-in iterations");
  est->add_option("--thin", thin, "Keep every k-th post-burn-in draw");
  est->add_option("--seed", seed, "Random seed");
  est->add_option("--C", C, "Adaptation constant");
  est->add_option("--kappa", kappa, "Diffuse initial state variance");
  est->add_option("--lambda-scale", lambda_scale, "Lambda prior support: pi or 2pi");
  est->add_option("--chains", chains, "Independent chains run in parallel");
  est->add_option("--level", level, "Credible level of HPD intervals");
  est->add_option("--max-paths", max_paths, "State paths kept for bands");
  est->add_flag("--init-prior-draw", init_prior_draw, "Start from a prior draw instead of prior means");
  est->add_flag("--no-adapt", no_adapt, "Freeze the MH proposals at their priors");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate synthetic GDP (and CPI) series");
  std::string sim_spec, params_path, sim_out = "ucgap_sim", start = "1960-Q1", sim_lambda = "pi";
  std::vector<std::string> param_kv;
  long n_obs = 216;
  std::uint64_t sim_seed = 1;
  double init_scale = 1.0;
  sim->add_option("--spec", sim_spec, "Model spec")->required();
  sim->add_option("--params", params_path, "JSON object of parameter values");
  sim->add_option("--param", param_kv, "name=value override (repeatable)");
  sim->add_option("--T", n_obs, "Number of model observations");
  sim->add_option("--seed", sim_seed, "Random seed");
  sim->add_option("--init-scale", init_scale, "Variance of the initial state");
  sim->add_option("--start", start, "First quarter, YYYY-Qn");
  sim->add_option("--lambda-scale", sim_lambda, "Lambda support: pi or 2pi");
  sim->add_option("--out", sim_out, "Output directory");

  // summarize
  auto* sum = app.add_subcommand("summarize", "Recompute summary.csv from draws.csv");
  std::string draws_path, sum_spec, sum_out;
  double sum_level = 0.95;
  sum->add_option("--draws", draws_path, "draws.csv written by estimate")->required();
  sum->add_option("--spec", sum_spec, "Expected model spec");
  sum->add_option("--out", sum_out, "Summary CSV path (default: stdout)");
  sum->add_option("--level", sum_level, "Credible level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*est) {
      EstimateOptions opt;
      if (!config_path.empty()) opt = estimate_options_from_json(read_json(config_path));
      if (!spec_name.empty()) opt.spec = ModelSpec::parse(spec_name);
      if (!gdp.empty()) opt.gdp_path = gdp;
      if (!cpi.empty()) opt.cpi_path = cpi;
      if (!out_dir.empty()) opt.out_dir = out_dir;
      if (est->count("--iters")) opt.run.n_iter = iters;
      if (est->count("--burnin")) opt.run.burn_in = burnin;
      if (est->count("--thin")) opt.run.thin = thin;
      if (est->count("--seed")) opt.run.seed = seed;
      if (est->count("--C")) opt.run.adaptation_constant = C;
      if (est->count("--kappa")) opt.run.kappa_init = kappa;
      if (est->count("--chains")) opt.chains = chains;
      if (est->count("--level")) opt.level = level;
      if (est->count("--max-paths")) opt.run.max_stored_paths = max_paths;
      if (init_prior_draw) opt.run.init_from_prior_draw = true;
      if (no_adapt) opt.run.adapt = false;
      if (!lambda_scale.empty()) opt.prior.set_lambda_scale(parse_lambda_scale(lambda_scale));
      if (config_path.empty() && spec_name.empty())
        return report("usage", "estimate needs --spec or --config", kExitUsage);
      try {
        opt.validate();
      } catch (const ValidationError& e) {
        return report("usage", e.what(), kExitUsage);
      }
      const EstimateResult res = run_estimate(opt);
      std::printf("wrote %s (%lld kept draws, %.1f s)\n", opt.out_dir.string().c_str(),
                  static_cast<long long>(res.chains.front().n_keep()) * opt.chains,
                  res.wall_seconds);
    } else if (*sim) {
      SimulateOptions opt;
      opt.spec = ModelSpec::parse(sim_spec);
      opt.lambda_scale = parse_lambda_scale(sim_lambda);
      PriorConfig prior = default_priors();
      prior.set_lambda_scale(opt.lambda_scale);
      opt.params = prior_means(opt.spec, prior);
      if (!params_path.empty()) {
        const ParameterVector given = parameters_from_json(read_json(params_path));
        for (Param p : kAllParams) {
          if (given[p] != 0.0 || is_active(opt.spec, p)) opt.params[p] = given[p];
        }
      }
      for (const std::string& kv : param_kv) {
        const auto eq = kv.find('=');
        const auto p = eq == std::string::npos ? std::nullopt : param_from_name(kv.substr(0, eq));
        if (!p) return report("usage", "bad --param '" + kv + "', expected name=value", kExitUsage);
        opt.params[*p] = std::stod(kv.substr(eq + 1));
      }
      opt.n_obs = n_obs;
      opt.seed = sim_seed;
      opt.init_scale = init_scale;
      opt.start = Quarter::parse(start);
      opt.out_dir = sim_out;
      run_simulate(opt);
      std::printf("wrote %s\n", opt.out_dir.string().c_str());
    } else if (*sum) {
      std::optional<ModelSpec> spec;
      if (!sum_spec.empty()) spec = ModelSpec::parse(sum_spec);
      const PosteriorDraws draws = draws_from_table(read_draws_csv(draws_path), spec);
      const auto rows = summarize(draws, sum_level);
      if (sum_out.empty()) {
        const std::string tmp = "/dev/stdout";
        write_summary_csv(tmp, rows);
      } else {
        write_summary_csv(sum_out, rows);
      }
    }
  } catch (const ValidationError& e) {
    return report("validation", e.what(), kExitFailure);
  } catch (const StructuralError& e) {
    return report("structural", e.what(), kExitFailure);
  } catch (const DomainError& e) {
    return report("domain", e.what(), kExitFailure);
  } catch (const NumericalError& e) {
    return report("numerical", e.what(), kExitFailure);
  } catch (const std::exception& e) {
    return report("internal", e.what(), kExitFailure);
  }
  return 0;
}
