#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucgap/diagnostics.hpp"
#include "ucgap/io.hpp"
#include "ucgap/sampler.hpp"

namespace ucgap {

/// Everything needed to reproduce an estimation run.
struct EstimateOptions {
  ModelSpec spec;
  PriorConfig prior = default_priors();
  RunConfig run;
  std::filesystem::path gdp_path;
  std::optional<std::filesystem::path> cpi_path;
  std::filesystem::path out_dir = "ucgap_out";
  unsigned chains = 1;  // chain k uses seed run.seed + k
  double level = 0.95;

  void validate() const;
};

nlohmann::json estimate_options_to_json(const EstimateOptions& opt);
/// Accepts a bare options object or a manifest holding one under "config".
EstimateOptions estimate_options_from_json(const nlohmann::json& j);

/// Per-quarter smoothed components: MaP-parameter smoother means plus the
/// pointwise mean and HPD band of the stored sampled paths.
struct StateSummary {
  std::vector<Quarter> dates;
  ObservationMatrix observations;
  SmootherOutput map_smoothed;
  StateLayout layout;
  PathBand trend;
  PathBand cycle;
  std::optional<PathBand> core_inflation;
};
StateSummary summarize_states(const PosteriorDraws& draws, const ModelData& data,
                              const PriorConfig& prior, double kappa_init, double level);
void write_states_csv(const std::filesystem::path& path, const StateSummary& s);

struct EstimateResult {
  std::vector<PosteriorDraws> chains;
  std::vector<SummaryRow> summary;  // pooled when several chains ran
  double wall_seconds = 0.0;
};

/// Loads data, runs the chains and writes draws.csv, summary.csv, states.csv,
/// turning_points.csv and manifest.json. With several chains the per-chain
/// artifacts go to chain_<k>/ and the top level gets the pooled summary.
EstimateResult run_estimate(const EstimateOptions& opt);

/// Concatenates kept draws of chains sharing a spec.
PosteriorDraws pool_chains(const std::vector<PosteriorDraws>& chains);

struct SimulateOptions {
  ModelSpec spec;
  ParameterVector params;
  Eigen::Index n_obs = 216;
  std::uint64_t seed = 1;
  double init_scale = 1.0;
  Quarter start{1960, 1};
  LambdaScale lambda_scale = LambdaScale::Pi;
  std::filesystem::path out_dir = "ucgap_sim";
};

/// Writes gdp.csv (and cpi.csv for bivariate specs) plus truth.json. Bivariate
/// files carry one extra leading quarter so that transform() returns n_obs rows.
ModelData run_simulate(const SimulateOptions& opt);

/// Rebuilds PosteriorDraws from a draws table; the spec is inferred from the
/// column names unless given.
PosteriorDraws draws_from_table(const DrawTable& table, std::optional<ModelSpec> spec = {});

}  // namespace ucgap
