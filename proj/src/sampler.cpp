#include "ucgap/sampler.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ucgap/errors.hpp"

namespace ucgap {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double sum_of_squares(const Vector& r) {
  const double ss = r.squaredNorm();
  if (!std::isfinite(ss)) throw NumericalError("non-finite residual sum of squares");
  return ss;
}

}  // namespace

bool is_gibbs_block(Param p) {
  return p == Param::Sigma2Eps || p == Param::Sigma2Vareps || p == Param::Sigma2Eta ||
         p == Param::Drift || p == Param::Sigma2Zeta;
}

bool is_mh_block(Param p) { return !is_gibbs_block(p); }

PathStatistics path_statistics(const ModelSpec& spec, const LatentStatePath& states) {
  const StateLayout l = state_layout(spec);
  const Eigen::Index n = states.rows();
  if (states.cols() != l.p) throw StructuralError("path_statistics: state path has wrong width");
  if (n < 2) throw StructuralError("path_statistics: need at least two time points");
  PathStatistics s;
  s.psi_next = states.col(l.psi).tail(n - 1);
  s.psi_cur = states.col(l.psi).head(n - 1);
  s.psi_prev = states.col(l.psi_lag).head(n - 1);
  if (spec.bivariate()) {
    s.dtau = states.col(l.tau).tail(n - 1) - states.col(l.tau).head(n - 1);
  }
  return s;
}

double cycle_log_likelihood(const ModelSpec& spec, const ParameterVector& params,
                            const PathStatistics& stats, double lambda_max) {
  const double rho = params[Param::Rho];
  const double lambda = params[Param::Lambda];
  const double s2k = params[Param::Sigma2Kappa];
  if (!(rho > 0.0 && rho < 1.0) || !(lambda > 0.0 && lambda < lambda_max) || !(s2k > 0.0))
    return kNegInf;
  const double phi1 = 2.0 * rho * std::cos(lambda);
  const double phi2 = -rho * rho;
  const auto n = static_cast<double>(stats.psi_next.size());

  // kappa_{t+1} = psi_{t+1} - phi1 psi_t - phi2 psi_{t-1}
  const Vector nu_psi = stats.psi_next - phi1 * stats.psi_cur - phi2 * stats.psi_prev;
  double out = -0.5 * (n * (kLog2Pi + std::log(s2k)) + nu_psi.squaredNorm() / s2k);
  if (!spec.bivariate()) return out;

  const double s2xi = params[Param::Sigma2Xi];
  if (!(s2xi > 0.0)) return kNegInf;
  const double theta0 = params[Param::Theta0];
  const double theta1 = params[Param::Theta1];
  // Given nu_psi, the tau innovation nu_tau = theta0 kappa + xi has conditional
  // mean theta0 nu_psi and variance s2xi; the pair has covariance Sigma(theta0).
  const Vector nu_tau = stats.dtau - (theta0 * phi1 + theta1) * stats.psi_cur -
                        (theta0 * phi2) * stats.psi_prev;
  const Vector xi = nu_tau - theta0 * nu_psi;
  out += -0.5 * (n * (kLog2Pi + std::log(s2xi)) + xi.squaredNorm() / s2xi);
  return out;
}

InverseGammaPosterior variance_full_conditional(Param block, const ModelSpec& spec,
                                                const ParameterVector& params,
                                                const LatentStatePath& states,
                                                const ObservationMatrix& data,
                                                const PriorConfig& prior) {
  if (!is_active(spec, block) || !is_variance(block) || !is_gibbs_block(block))
    throw StructuralError("variance_full_conditional: " + std::string(param_name(block)) +
                          " is not a Gibbs variance block under " + spec.name());
  const StateLayout l = state_layout(spec);
  const Eigen::Index n = states.rows();
  if (data.rows() != n || data.cols() != l.d || states.cols() != l.p)
    throw StructuralError("variance_full_conditional: data/state shape mismatch");
  const Prior& pr = prior[block];

  Vector resid;
  switch (block) {
    case Param::Sigma2Eps:
      resid = data.col(0) - states.col(l.mu) - states.col(l.psi);
      break;
    case Param::Sigma2Vareps:
      resid = data.col(1) - states.col(l.tau);
      break;
    case Param::Sigma2Eta: {
      resid = states.col(l.mu).tail(n - 1) - states.col(l.mu).head(n - 1);
      if (l.beta >= 0) resid -= states.col(l.beta).head(n - 1);
      if (spec.trend == Trend::LLD) resid.array() -= params[Param::Drift];
      break;
    }
    case Param::Sigma2Zeta:
      resid = states.col(l.beta).tail(n - 1) - states.col(l.beta).head(n - 1);
      break;
    default:
      break;
  }
  const double ss = sum_of_squares(resid);
  return {pr.a + 0.5 * static_cast<double>(resid.size()), pr.b + 0.5 * ss};
}

double gibbs_variance_step(Param block, const ModelSpec& spec, const ParameterVector& params,
                           const LatentStatePath& states, const ObservationMatrix& data,
                           const PriorConfig& prior, RandomStream& rng) {
  const InverseGammaPosterior post =
      variance_full_conditional(block, spec, params, states, data, prior);
  return rng.inverse_gamma(post.shape, post.scale);
}

double drift_gibbs_step(const ModelSpec& spec, const ParameterVector& params,
                        const LatentStatePath& states, const PriorConfig& prior,
                        RandomStream& rng) {
  if (spec.trend != Trend::LLD) throw StructuralError("drift_gibbs_step: spec has no drift");
  const StateLayout l = state_layout(spec);
  const Eigen::Index n = states.rows();
  const Vector dmu = states.col(l.mu).tail(n - 1) - states.col(l.mu).head(n - 1);
  const Prior& pr = prior[Param::Drift];
  const double s2eta = params[Param::Sigma2Eta];
  const double precision = 1.0 / pr.b + static_cast<double>(n - 1) / s2eta;
  const double mean = (pr.a / pr.b + dmu.sum() / s2eta) / precision;
  if (!std::isfinite(mean)) throw NumericalError("drift_gibbs_step: non-finite posterior mean");
  return mean + rng.normal() / std::sqrt(precision);
}

double mh_log_ratio(Param block, const ModelSpec& spec, const ParameterVector& current,
                    double candidate, const AdaptiveProposal& proposal,
                    const PathStatistics& stats, const PriorConfig& prior) {
  const Prior& pr = prior[block];
  const double lp_cand = pr.log_density(candidate);
  if (lp_cand == kNegInf) return kNegInf;
  ParameterVector cand_params = current;
  cand_params[block] = candidate;
  const double ll_cand = cycle_log_likelihood(spec, cand_params, stats, prior.lambda_max());
  if (ll_cand == kNegInf) return kNegInf;
  const double lq_cand = proposal.log_density(candidate);
  if (lq_cand == kNegInf) return kNegInf;

  const double x = current[block];
  const double ll_cur = cycle_log_likelihood(spec, current, stats, prior.lambda_max());
  const double log_ratio = (ll_cand + lp_cand - lq_cand) -
                           (ll_cur + pr.log_density(x) - proposal.log_density(x));
  return std::isnan(log_ratio) ? kNegInf : log_ratio;
}

MhOutcome aimh_step(Param block, const ModelSpec& spec, ParameterVector& params,
                    const AdaptiveProposal& proposal, const PathStatistics& stats,
                    const PriorConfig& prior, RandomStream& rng) {
  if (!is_mh_block(block) || !is_active(spec, block))
    throw StructuralError("aimh_step: " + std::string(param_name(block)) +
                          " is not an MH block under " + spec.name());
  const double candidate = proposal.sample(rng);
  const double log_u = std::log(rng.uniform());
  const double log_ratio = mh_log_ratio(block, spec, params, candidate, proposal, stats, prior);
  if (log_u < log_ratio) {
    params[block] = candidate;
    return {candidate, true};
  }
  return {params[block], false};
}

void RunConfig::validate() const {
  if (n_iter < burn_in) throw ValidationError("n_iter must be >= burn_in");
  if (thin < 1) throw ValidationError("thin must be >= 1");
  if ((n_iter - burn_in) % thin != 0)
    throw ValidationError("n_iter - burn_in must be a multiple of thin");
  if (!(adaptation_constant > 0.0)) throw ValidationError("adaptation constant must be positive");
  if (!(kappa_init > 0.0) || !std::isfinite(kappa_init))
    throw ValidationError("kappa_init must be positive and finite");
}

ParameterVector PosteriorDraws::row(Eigen::Index i) const {
  ParameterVector out;
  for (std::size_t j = 0; j < params.size(); ++j) out[params[j]] = draws(i, static_cast<Eigen::Index>(j));
  return out;
}

Vector PosteriorDraws::column(Param p) const {
  for (std::size_t j = 0; j < params.size(); ++j) {
    if (params[j] == p) return draws.col(static_cast<Eigen::Index>(j));
  }
  throw StructuralError("PosteriorDraws: parameter " + std::string(param_name(p)) +
                        " was not sampled");
}

double log_joint_posterior(const ModelSpec& spec, const PriorConfig& prior,
                           const ParameterVector& params, const LatentStatePath& states,
                           const ObservationMatrix& data, double kappa_init) {
  const double lp = log_prior_density(spec, params, prior);
  if (lp == kNegInf) return kNegInf;
  const StateSpaceModel model = build_model(spec, params, kappa_init, prior.lambda_max());
  return complete_data_log_density(model, data, states) + lp;
}

PosteriorDraws run_chain(const ModelSpec& spec, const PriorConfig& prior,
                         const ObservationMatrix& data, const RunConfig& cfg,
                         const IterationObserver& observer) {
  cfg.validate();
  prior.validate();
  const StateLayout layout = state_layout(spec);
  const Eigen::Index n_obs = data.rows();
  if (data.cols() != layout.d)
    throw ValidationError("run_chain: " + spec.name() + " needs " + std::to_string(layout.d) +
                          " data columns, got " + std::to_string(data.cols()));
  if (n_obs < 8) throw ValidationError("run_chain: need at least 8 observations");
  if (!data.allFinite()) throw ValidationError("run_chain: data must be complete and finite");

  const double lambda_max = prior.lambda_max();
  RandomStream rng(cfg.seed);

  ParameterVector params = cfg.init_from_prior_draw ? sample_prior(spec, prior, rng)
                                                    : prior_means(spec, prior);
  validate_parameters(spec, params, false, lambda_max);

  const std::vector<Param> active = active_params(spec);
  std::map<Param, AdaptiveProposal> proposals;
  for (Param p : active) {
    if (is_mh_block(p)) proposals.emplace(p, AdaptiveProposal::from_prior(prior[p]));
  }

  const auto draw_states = [&](const ParameterVector& xi) {
    const StateSpaceModel model = build_model(spec, xi, cfg.kappa_init, lambda_max);
    return SimulationSmoother(model, n_obs).draw(data, rng);
  };
  LatentStatePath states = draw_states(params);

  PosteriorDraws out;
  out.spec = spec;
  out.params = active;
  out.n_iter = cfg.n_iter;
  out.burn_in = cfg.burn_in;
  out.thin = cfg.thin;
  out.seed = cfg.seed;
  const auto n_keep = static_cast<Eigen::Index>((cfg.n_iter - cfg.burn_in) / cfg.thin);
  out.draws.resize(n_keep, static_cast<Eigen::Index>(active.size()));
  out.log_posterior.resize(n_keep);
  for (Param p : active) {
    if (is_mh_block(p)) out.acceptance[p] = {};
  }

  const std::size_t max_paths = std::max<std::size_t>(cfg.max_stored_paths, 1);
  const Eigen::Index path_stride =
      n_keep == 0 ? 1
                  : std::max<Eigen::Index>(1, (n_keep + static_cast<Eigen::Index>(max_paths) - 1) /
                                                  static_cast<Eigen::Index>(max_paths));
  const Eigen::Index n_stored = n_keep == 0 ? 0 : (n_keep + path_stride - 1) / path_stride;
  out.trend_paths.resize(n_stored, n_obs);
  out.cycle_paths.resize(n_stored, n_obs);
  if (spec.bivariate()) out.inflation_trend_paths.resize(n_stored, n_obs);

  Eigen::Index kept = 0;
  Eigen::Index stored = 0;
  double best_log_post = kNegInf;

  for (std::uint64_t iter = 1; iter <= cfg.n_iter; ++iter) {
    const std::string where = " at iteration " + std::to_string(iter);
    const double delta = cfg.adapt ? step_size(iter + 1, cfg.adaptation_constant) : 0.0;
    Param current_block = Param::Sigma2Eps;
    try {
      // Conjugate blocks.
      for (Param p : active) {
        if (!is_gibbs_block(p)) continue;
        current_block = p;
        params[p] = p == Param::Drift
                        ? drift_gibbs_step(spec, params, states, prior, rng)
                        : gibbs_variance_step(p, spec, params, states, data, prior, rng);
      }

      // Adaptive independence MH blocks, conditional on the current path.
      const PathStatistics stats = path_statistics(spec, states);
      for (Param p : active) {
        if (!is_mh_block(p)) continue;
        current_block = p;
        AdaptiveProposal& prop = proposals.at(p);
        const MhOutcome res = aimh_step(p, spec, params, prop, stats, prior, rng);
        AcceptanceStats& acc = out.acceptance[p];
        ++acc.proposed;
        if (res.accepted) ++acc.accepted;
        if (cfg.adapt) prop = adapt(prop, params[p], delta);
      }

      current_block = Param::Sigma2Eps;
      states = draw_states(params);
    } catch (const std::exception& e) {
      throw NumericalError("run_chain: block " + std::string(param_name(current_block)) + where +
                           ": " + e.what());
    }

    const bool keep = iter > cfg.burn_in && (iter - cfg.burn_in) % cfg.thin == 0;
    double log_post = std::numeric_limits<double>::quiet_NaN();
    if (keep) {
      log_post = log_joint_posterior(spec, prior, params, states, data, cfg.kappa_init);
      for (std::size_t j = 0; j < active.size(); ++j)
        out.draws(kept, static_cast<Eigen::Index>(j)) = params[active[j]];
      out.log_posterior(kept) = log_post;
      if (kept % path_stride == 0) {
        out.stored_draw_index.push_back(kept);
        out.trend_paths.row(stored) = states.col(layout.mu).transpose();
        out.cycle_paths.row(stored) = states.col(layout.psi).transpose();
        if (spec.bivariate()) out.inflation_trend_paths.row(stored) = states.col(layout.tau).transpose();
        ++stored;
      }
      if (log_post > best_log_post || out.map_states.size() == 0) {
        best_log_post = log_post;
        out.map_states = states;
      }
      ++kept;
    }
    if (observer) observer(IterationView{iter, keep, params, states, log_post});
  }
  out.final_proposals = proposals;
  return out;
}

}  // namespace ucgap
