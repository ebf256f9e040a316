#include "ucgap/estimate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <exception>
#include <fstream>
#include <thread>

#include "ucgap/errors.hpp"

namespace ucgap {
namespace {

using nlohmann::json;

json acceptance_json(const PosteriorDraws& d) {
  json j = json::object();
  for (const auto& [p, a] : d.acceptance) {
    j[std::string(param_name(p))] = {{"proposed", a.proposed}, {"accepted", a.accepted},
                                     {"rate", a.rate()}};
  }
  return j;
}

json proposals_json(const PosteriorDraws& d) {
  json j = json::object();
  for (const auto& [p, prop] : d.final_proposals) {
    j[std::string(param_name(p))] = {{"first", prop.first}, {"second", prop.second},
                                     {"scale", prop.scale}};
  }
  return j;
}

void write_chain_artifacts(const std::filesystem::path& dir, const PosteriorDraws& draws,
                           const ModelData& data, const EstimateOptions& opt,
                           const std::vector<SummaryRow>& summary) {
  write_draws_csv(dir / "draws.csv", draws);
  write_summary_csv(dir / "summary.csv", summary);
  if (draws.n_keep() == 0) return;
  const StateSummary states =
      summarize_states(draws, data, opt.prior, opt.run.kappa_init, opt.level);
  write_states_csv(dir / "states.csv", states);
  const Vector cycle = states.map_smoothed.mean.col(states.layout.psi);
  write_turning_points_csv(dir / "turning_points.csv", turning_points(cycle), data.dates);
}

}  // namespace

void EstimateOptions::validate() const {
  run.validate();
  prior.validate();
  if (chains < 1) throw ValidationError("chains must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("level must lie in (0, 1)");
  if (gdp_path.empty()) throw ValidationError("missing GDP input (--gdp)");
  if (spec.bivariate() && !cpi_path)
    throw ValidationError(spec.name() + " needs a CPI input (--cpi)");
  if (!spec.bivariate() && cpi_path)
    throw ValidationError(spec.name() + " is univariate; --cpi is not used");
}

json estimate_options_to_json(const EstimateOptions& opt) {
  json j = run_config_to_json(opt.run);
  const json pj = prior_config_to_json(opt.prior);
  j["spec"] = opt.spec.name();
  j["lambda_scale"] = pj["lambda_scale"];
  j["priors"] = pj["priors"];
  j["gdp"] = opt.gdp_path.string();
  j["cpi"] = opt.cpi_path ? json(opt.cpi_path->string()) : json(nullptr);
  j["out"] = opt.out_dir.string();
  j["chains"] = opt.chains;
  j["level"] = opt.level;
  return j;
}

EstimateOptions estimate_options_from_json(const json& raw) {
  const json& j = raw.contains("config") ? raw.at("config") : raw;
  if (!j.is_object()) throw ValidationError("configuration must be a JSON object");
  EstimateOptions opt;
  try {
    if (j.contains("spec")) opt.spec = ModelSpec::parse(j.at("spec").get<std::string>());
    opt.prior = prior_config_from_json(j);
    opt.run = run_config_from_json(j);
    if (j.contains("gdp")) opt.gdp_path = j.at("gdp").get<std::string>();
    if (j.contains("cpi") && !j.at("cpi").is_null()) opt.cpi_path = j.at("cpi").get<std::string>();
    if (j.contains("out")) opt.out_dir = j.at("out").get<std::string>();
    opt.chains = j.value("chains", opt.chains);
    opt.level = j.value("level", opt.level);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("configuration: ") + e.what());
  }
  return opt;
}

StateSummary summarize_states(const PosteriorDraws& draws, const ModelData& data,
                              const PriorConfig& prior, double kappa_init, double level) {
  StateSummary s;
  s.dates = data.dates;
  s.observations = data.observations;
  s.layout = state_layout(draws.spec);
  const ParameterVector map = map_estimate(draws);
  const StateSpaceModel model = build_model(draws.spec, map, kappa_init, prior.lambda_max());
  s.map_smoothed = kalman_smoother(model, kalman_filter(model, data.observations));
  s.trend = path_band(draws.trend_paths, level);
  s.cycle = path_band(draws.cycle_paths, level);
  if (draws.spec.bivariate()) s.core_inflation = path_band(draws.inflation_trend_paths, level);
  return s;
}

void write_states_csv(const std::filesystem::path& path, const StateSummary& s) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  const bool biv = s.core_inflation.has_value();
  out << "date,y,trend_map,cycle_map,trend_mean,trend_lower,trend_upper,"
         "cycle_mean,cycle_lower,cycle_upper";
  if (biv) out << ",pi,core_map,core_mean,core_lower,core_upper";
  out << '\n';
  const auto f = [](double x) { return format_double(x); };
  for (Eigen::Index t = 0; t < s.observations.rows(); ++t) {
    const auto k = static_cast<std::size_t>(t);
    out << (k < s.dates.size() ? s.dates[k].str() : std::string()) << ','
        << f(s.observations(t, 0)) << ',' << f(s.map_smoothed.mean(t, s.layout.mu)) << ','
        << f(s.map_smoothed.mean(t, s.layout.psi)) << ',' << f(s.trend.mean(t)) << ','
        << f(s.trend.lower(t)) << ',' << f(s.trend.upper(t)) << ',' << f(s.cycle.mean(t)) << ','
        << f(s.cycle.lower(t)) << ',' << f(s.cycle.upper(t));
    if (biv) {
      const PathBand& c = *s.core_inflation;
      out << ',' << f(s.observations(t, 1)) << ',' << f(s.map_smoothed.mean(t, s.layout.tau)) << ','
          << f(c.mean(t)) << ',' << f(c.lower(t)) << ',' << f(c.upper(t));
    }
    out << '\n';
  }
}

PosteriorDraws pool_chains(const std::vector<PosteriorDraws>& chains) {
  if (chains.empty()) throw StructuralError("pool_chains: no chains");
  if (chains.size() == 1) return chains.front();
  PosteriorDraws out = chains.front();
  Eigen::Index n = 0;
  Eigen::Index n_paths = 0;
  for (const PosteriorDraws& c : chains) {
    if (!(c.spec == out.spec) || c.params != out.params)
      throw StructuralError("pool_chains: chains disagree on the model");
    n += c.n_keep();
    n_paths += c.trend_paths.rows();
  }
  out.draws.resize(n, static_cast<Eigen::Index>(out.params.size()));
  out.log_posterior.resize(n);
  out.trend_paths.resize(n_paths, chains.front().trend_paths.cols());
  out.cycle_paths.resize(n_paths, chains.front().cycle_paths.cols());
  if (out.spec.bivariate()) out.inflation_trend_paths.resize(n_paths, chains.front().trend_paths.cols());
  out.stored_draw_index.clear();
  out.acceptance.clear();
  Eigen::Index row = 0;
  Eigen::Index prow = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (const PosteriorDraws& c : chains) {
    out.draws.middleRows(row, c.n_keep()) = c.draws;
    out.log_posterior.segment(row, c.n_keep()) = c.log_posterior;
    const Eigen::Index np = c.trend_paths.rows();
    out.trend_paths.middleRows(prow, np) = c.trend_paths;
    out.cycle_paths.middleRows(prow, np) = c.cycle_paths;
    if (out.spec.bivariate()) out.inflation_trend_paths.middleRows(prow, np) = c.inflation_trend_paths;
    for (Eigen::Index k : c.stored_draw_index) out.stored_draw_index.push_back(k + row);
    for (const auto& [p, a] : c.acceptance) {
      out.acceptance[p].proposed += a.proposed;
      out.acceptance[p].accepted += a.accepted;
    }
    if (c.n_keep() > 0 && c.log_posterior.maxCoeff() > best) {
      best = c.log_posterior.maxCoeff();
      out.map_states = c.map_states;
    }
    row += c.n_keep();
    prow += np;
  }
  return out;
}

EstimateResult run_estimate(const EstimateOptions& opt) {
  opt.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const SeriesFile gdp = load_series(opt.gdp_path);
  std::optional<SeriesFile> cpi;
  if (opt.cpi_path) cpi = load_series(*opt.cpi_path);
  const ModelData data = transform(gdp, cpi);

  EstimateResult result;
  result.chains.resize(opt.chains);
  std::vector<std::exception_ptr> errors(opt.chains);
  const auto work = [&](unsigned k) {
    try {
      RunConfig cfg = opt.run;
      cfg.seed = opt.run.seed + k;
      result.chains[k] = run_chain(opt.spec, opt.prior, data.observations, cfg);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (opt.chains == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < opt.chains; ++k) pool.emplace_back(work, k);
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::filesystem::create_directories(opt.out_dir);
  const PosteriorDraws pooled = pool_chains(result.chains);
  result.summary = summarize(pooled, opt.level);
  if (opt.chains == 1) {
    write_chain_artifacts(opt.out_dir, pooled, data, opt, result.summary);
  } else {
    for (unsigned k = 0; k < opt.chains; ++k) {
      const PosteriorDraws& c = result.chains[k];
      write_chain_artifacts(opt.out_dir / ("chain_" + std::to_string(k)), c, data, opt,
                            summarize(c, opt.level));
    }
    write_summary_csv(opt.out_dir / "summary.csv", result.summary);
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest;
  manifest["config"] = estimate_options_to_json(opt);
  manifest["n_obs"] = data.observations.rows();
  manifest["first_date"] = data.dates.front().str();
  manifest["last_date"] = data.dates.back().str();
  manifest["n_keep"] = pooled.n_keep();
  manifest["wall_seconds"] = result.wall_seconds;
  json chains = json::array();
  for (unsigned k = 0; k < opt.chains; ++k) {
    const PosteriorDraws& c = result.chains[k];
    json cj{{"seed", c.seed}, {"n_keep", c.n_keep()}, {"acceptance", acceptance_json(c)},
            {"final_proposals", proposals_json(c)}};
    if (c.n_keep() > 0) {
      cj["map"] = parameters_to_json(c.spec, map_estimate(c));
      cj["map_log_posterior"] = c.log_posterior(map_index(c));
    }
    chains.push_back(cj);
  }
  manifest["chains"] = chains;
  manifest["acceptance"] = acceptance_json(pooled);
  write_text(opt.out_dir / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

ModelData run_simulate(const SimulateOptions& opt) {
  const double lambda_max = lambda_support(opt.lambda_scale);
  validate_parameters(opt.spec, opt.params, /*allow_zero_variances=*/true, lambda_max);
  if (opt.n_obs < 8) throw ValidationError("simulate: need at least 8 observations");
  if (!(opt.init_scale >= 0.0)) throw ValidationError("simulate: init scale must be >= 0");
  RandomStream rng(opt.seed);
  const bool biv = opt.spec.bivariate();
  const Eigen::Index n_sim = biv ? opt.n_obs + 1 : opt.n_obs;
  const SimulatedData sim = simulate_data(opt.spec, opt.params, n_sim, rng, opt.init_scale, lambda_max);

  SeriesFile gdp;
  SeriesFile cpi;
  Quarter q = opt.start;
  double level = 100.0;
  for (Eigen::Index t = 0; t < n_sim; ++t) {
    gdp.dates.push_back(q);
    gdp.values.push_back(std::exp(sim.observations(t, 0) / 100.0));
    if (biv) {
      if (t > 0) level *= std::exp(sim.observations(t, 1) / 400.0);
      cpi.dates.push_back(q);
      cpi.values.push_back(level);
    }
    q = q.next();
  }
  write_series(opt.out_dir / "gdp.csv", gdp);
  if (biv) write_series(opt.out_dir / "cpi.csv", cpi);

  const Eigen::Index off = biv ? 1 : 0;
  const StateLayout l = state_layout(opt.spec);
  json states = json::object();
  const auto col = [&](int c) {
    std::vector<double> v;
    for (Eigen::Index t = off; t < n_sim; ++t) v.push_back(sim.states(t, c));
    return v;
  };
  states["trend"] = col(l.mu);
  if (l.beta >= 0) states["slope"] = col(l.beta);
  states["cycle"] = col(l.psi);
  if (biv) states["core_inflation"] = col(l.tau);
  std::vector<std::string> dates;
  for (std::size_t t = static_cast<std::size_t>(off); t < gdp.dates.size(); ++t)
    dates.push_back(gdp.dates[t].str());

  json truth{{"spec", opt.spec.name()},
             {"params", parameters_to_json(opt.spec, opt.params)},
             {"n_obs", opt.n_obs},
             {"seed", opt.seed},
             {"init_scale", opt.init_scale},
             {"lambda_scale", opt.lambda_scale == LambdaScale::Pi ? "pi" : "2pi"},
             {"dates", dates},
             {"states", states}};
  write_text(opt.out_dir / "truth.json", truth.dump(2) + "\n");

  ModelData out;
  out.observations = sim.observations.bottomRows(opt.n_obs);
  out.dates.assign(gdp.dates.begin() + off, gdp.dates.end());
  return out;
}

PosteriorDraws draws_from_table(const DrawTable& table, std::optional<ModelSpec> spec) {
  std::vector<Param> params;
  for (const std::string& name : table.names) {
    const auto p = param_from_name(name);
    if (!p) throw ValidationError("draws: unknown column '" + name + "'");
    params.push_back(*p);
  }
  const auto has = [&](Param p) { return std::find(params.begin(), params.end(), p) != params.end(); };
  ModelSpec inferred;
  inferred.variate = has(Param::Theta0) ? Variate::Bivariate : Variate::Univariate;
  if (has(Param::Drift)) {
    inferred.trend = Trend::LLD;
  } else if (has(Param::Sigma2Zeta)) {
    inferred.trend = has(Param::Sigma2Eta) ? Trend::LT : Trend::IRW;
  } else {
    inferred.trend = Trend::LL;
  }
  if (spec && !(*spec == inferred))
    throw ValidationError("draws columns match " + inferred.name() + ", not " + spec->name());
  if (params != active_params(inferred))
    throw ValidationError("draws columns are not the parameter set of " + inferred.name());
  PosteriorDraws out;
  out.spec = inferred;
  out.params = params;
  out.draws = table.values;
  out.log_posterior = table.log_posterior;
  out.n_iter = static_cast<std::uint64_t>(table.values.rows());
  return out;
}

}  // namespace ucgap
