#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "ucgap/adaptive_proposal.hpp"
#include "ucgap/models.hpp"
#include "ucgap/priors.hpp"
#include "ucgap/random.hpp"
#include "ucgap/statespace.hpp"

namespace ucgap {

/// Blocks drawn by conjugate Gibbs steps (the drift only under LLD).
bool is_gibbs_block(Param p);
/// Blocks drawn by adaptive independence Metropolis-Hastings.
bool is_mh_block(Param p);

/// Cycle and core-inflation increments extracted from a state path, used by
/// every MH target. Index k runs over transitions t -> t+1, t = 1..T-1.
struct PathStatistics {
  Vector psi_next;  // psi_{t+1}
  Vector psi_cur;   // psi_t
  Vector psi_prev;  // psi_{t-1}
  Vector dtau;      // tau_{t+1} - tau_t (bivariate only)
};
PathStatistics path_statistics(const ModelSpec& spec, const LatentStatePath& states);

/// Log density of the cycle (and core-inflation) transitions given the path:
/// bivariate: sum_t log N2(nu_{t+1}; 0, Sigma(theta0)) with
///   nu = (psi_{t+1} - phi1 psi_t - phi2 psi_{t-1},
///         dtau_{t+1} - (theta0 phi1 + theta1) psi_t - theta0 phi2 psi_{t-1}),
///   Sigma(theta0) = [[s2k, theta0 s2k], [theta0 s2k, theta0^2 s2k + s2xi]];
/// univariate: sum_t log N(nu_psi; 0, s2k).
/// Returns -infinity when parameters leave their support.
double cycle_log_likelihood(const ModelSpec& spec, const ParameterVector& params,
                            const PathStatistics& stats, double lambda_max);

/// Conjugate inverse-gamma full conditional of a variance block.
struct InverseGammaPosterior {
  double shape = 0.0;
  double scale = 0.0;
};
InverseGammaPosterior variance_full_conditional(Param block, const ModelSpec& spec,
                                                const ParameterVector& params,
                                                const LatentStatePath& states,
                                                const ObservationMatrix& data,
                                                const PriorConfig& prior);

/// Exact draw from the conjugate full conditional of a Gibbs variance block.
double gibbs_variance_step(Param block, const ModelSpec& spec, const ParameterVector& params,
                           const LatentStatePath& states, const ObservationMatrix& data,
                           const PriorConfig& prior, RandomStream& rng);

/// Conjugate Gaussian draw of the LLD drift given the trend path.
double drift_gibbs_step(const ModelSpec& spec, const ParameterVector& params,
                        const LatentStatePath& states, const PriorConfig& prior,
                        RandomStream& rng);

/// log of [target(cand) q(current)] / [target(current) q(cand)] for one MH
/// block, target = cycle_log_likelihood + log prior. -infinity if the
/// candidate leaves the support.
double mh_log_ratio(Param block, const ModelSpec& spec, const ParameterVector& current,
                    double candidate, const AdaptiveProposal& proposal,
                    const PathStatistics& stats, const PriorConfig& prior);

struct MhOutcome {
  double value = 0.0;
  bool accepted = false;
};

/// One independence MH update of `block`; updates `params` in place on acceptance.
MhOutcome aimh_step(Param block, const ModelSpec& spec, ParameterVector& params,
                    const AdaptiveProposal& proposal, const PathStatistics& stats,
                    const PriorConfig& prior, RandomStream& rng);

struct RunConfig {
  std::uint64_t n_iter = 2000;
  std::uint64_t burn_in = 1000;
  std::uint64_t thin = 1;
  std::uint64_t seed = 1;
  double adaptation_constant = kDefaultAdaptationConstant;
  double kappa_init = kDefaultDiffuseScale;
  /// Start from a prior draw instead of the prior means.
  bool init_from_prior_draw = false;
  /// Upper bound on the number of kept state paths retained for bands.
  std::size_t max_stored_paths = 2000;
  /// When false, MH proposals stay at their initial parameters.
  bool adapt = true;

  void validate() const;
};

struct AcceptanceStats {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  double rate() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
};

struct PosteriorDraws {
  ModelSpec spec;
  std::vector<Param> params;  // column order of `draws`
  Matrix draws;               // n_keep x n_params
  Vector log_posterior;       // log p(y, alpha, Xi) + log prior, per kept draw
  std::map<Param, AcceptanceStats> acceptance;
  std::uint64_t n_iter = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t thin = 1;
  std::uint64_t seed = 0;

  // State-path summaries: component paths of a subset of kept draws
  // (rows of stored_draw_index index into `draws`).
  std::vector<Eigen::Index> stored_draw_index;
  Matrix trend_paths;            // n_stored x T
  Matrix cycle_paths;            // n_stored x T
  Matrix inflation_trend_paths;  // n_stored x T (bivariate only)
  LatentStatePath map_states;    // state draw belonging to the highest log posterior

  std::map<Param, AdaptiveProposal> final_proposals;

  Eigen::Index n_keep() const { return draws.rows(); }
  ParameterVector row(Eigen::Index i) const;
  Vector column(Param p) const;
};

/// Per-iteration hook (tests, progress reporting).
struct IterationView {
  std::uint64_t iteration = 0;
  bool kept = false;
  const ParameterVector& params;
  const LatentStatePath& states;
  double log_posterior = 0.0;  // NaN on iterations that are not kept
};
using IterationObserver = std::function<void(const IterationView&)>;

/// Log joint posterior log p(y, alpha | Xi) + log p(Xi) up to the usual constants.
double log_joint_posterior(const ModelSpec& spec, const PriorConfig& prior,
                           const ParameterVector& params, const LatentStatePath& states,
                           const ObservationMatrix& data, double kappa_init);

/// Adaptive independent Metropolis-Hastings within Gibbs.
///
/// Each iteration visits, in order: sigma2_eps, sigma2_vareps, sigma2_eta,
/// drift, sigma2_zeta (Gibbs), then theta1, theta0, sigma2_xi, rho, lambda,
/// sigma2_kappa (adaptive independence MH, proposal adapted after each), and
/// finally draws the full state path with the simulation smoother. Blocks that
/// are inactive under `spec` are skipped.
PosteriorDraws run_chain(const ModelSpec& spec, const PriorConfig& prior,
                         const ObservationMatrix& data, const RunConfig& cfg,
                         const IterationObserver& observer = {});

}  // namespace ucgap
