#include "ucgap/models.hpp"

#include <cmath>
#include <string>

#include "ucgap/errors.hpp"

namespace ucgap {

std::string ModelSpec::name() const {
  std::string out = bivariate() ? "biv-" : "uni-";
  switch (trend) {
    case Trend::LL: return out + "ll";
    case Trend::LLD: return out + "lld";
    case Trend::LT: return out + "lt";
    case Trend::IRW: return out + "irw";
  }
  return out;
}

ModelSpec ModelSpec::parse(std::string_view name) {
  const auto dash = name.find('-');
  if (dash == std::string_view::npos)
    throw ValidationError("unknown model spec '" + std::string(name) + "'");
  const auto variate = name.substr(0, dash);
  const auto trend = name.substr(dash + 1);
  ModelSpec spec;
  if (variate == "uni") {
    spec.variate = Variate::Univariate;
  } else if (variate == "biv") {
    spec.variate = Variate::Bivariate;
  } else {
    throw ValidationError("unknown model spec '" + std::string(name) + "'");
  }
  if (trend == "ll") {
    spec.trend = Trend::LL;
  } else if (trend == "lld") {
    spec.trend = Trend::LLD;
  } else if (trend == "lt") {
    spec.trend = Trend::LT;
  } else if (trend == "irw") {
    spec.trend = Trend::IRW;
  } else {
    throw ValidationError("unknown model spec '" + std::string(name) + "'");
  }
  return spec;
}

std::string_view param_name(Param p) {
  switch (p) {
    case Param::Sigma2Eps: return "sigma2_eps";
    case Param::Sigma2Vareps: return "sigma2_vareps";
    case Param::Sigma2Eta: return "sigma2_eta";
    case Param::Drift: return "drift";
    case Param::Sigma2Zeta: return "sigma2_zeta";
    case Param::Theta1: return "theta1";
    case Param::Theta0: return "theta0";
    case Param::Sigma2Xi: return "sigma2_xi";
    case Param::Rho: return "rho";
    case Param::Lambda: return "lambda";
    case Param::Sigma2Kappa: return "sigma2_kappa";
  }
  return "?";
}

std::optional<Param> param_from_name(std::string_view name) {
  for (Param p : kAllParams) {
    if (param_name(p) == name) return p;
  }
  return std::nullopt;
}

bool is_variance(Param p) {
  switch (p) {
    case Param::Sigma2Eps:
    case Param::Sigma2Vareps:
    case Param::Sigma2Eta:
    case Param::Sigma2Zeta:
    case Param::Sigma2Xi:
    case Param::Sigma2Kappa:
      return true;
    default:
      return false;
  }
}

bool is_active(const ModelSpec& spec, Param p) {
  switch (p) {
    case Param::Sigma2Eps:
    case Param::Rho:
    case Param::Lambda:
    case Param::Sigma2Kappa:
      return true;
    case Param::Sigma2Vareps:
    case Param::Theta0:
    case Param::Theta1:
    case Param::Sigma2Xi:
      return spec.bivariate();
    case Param::Sigma2Eta:
      return spec.trend != Trend::IRW;
    case Param::Drift:
      return spec.trend == Trend::LLD;
    case Param::Sigma2Zeta:
      return spec.has_slope();
  }
  return false;
}

std::vector<Param> active_params(const ModelSpec& spec) {
  std::vector<Param> out;
  for (Param p : kAllParams) {
    if (is_active(spec, p)) out.push_back(p);
  }
  return out;
}

void validate_parameters(const ModelSpec& spec, const ParameterVector& params,
                         bool allow_zero_variances, double lambda_max) {
  for (Param p : kAllParams) {
    const double v = params[p];
    const std::string name(param_name(p));
    if (!std::isfinite(v)) throw ValidationError("parameter " + name + " is not finite");
    if (!is_active(spec, p)) {
      if (v != 0.0)
        throw StructuralError("parameter " + name + " is inactive under " + spec.name() +
                              " but set to a nonzero value");
      continue;
    }
    if (is_variance(p)) {
      if (allow_zero_variances ? v < 0.0 : !(v > 0.0))
        throw ValidationError("variance " + name + " out of range: " + std::to_string(v));
    }
  }
  const double rho = params[Param::Rho];
  if (allow_zero_variances ? !(rho >= 0.0 && rho < 1.0) : !(rho > 0.0 && rho < 1.0))
    throw ValidationError("rho out of range: " + std::to_string(rho));
  const double lambda = params[Param::Lambda];
  if (!(lambda > 0.0 && lambda < lambda_max))
    throw ValidationError("lambda out of range: " + std::to_string(lambda));
}

std::pair<double, double> cycle_coefficients(double rho, double lambda, double lambda_max) {
  if (!(rho >= 0.0 && rho < 1.0))
    throw DomainError("cycle_coefficients: rho must lie in [0, 1)");
  if (!(lambda > 0.0 && lambda < lambda_max))
    throw DomainError("cycle_coefficients: lambda must lie in (0, " + std::to_string(lambda_max) +
                      ")");
  return {2.0 * rho * std::cos(lambda), -rho * rho};
}

std::pair<double, double> cycle_from_coefficients(double phi1, double phi2) {
  if (!(phi2 > -1.0 && phi2 < 0.0))
    throw DomainError("cycle_from_coefficients: phi2 must lie in (-1, 0)");
  const double rho = std::sqrt(-phi2);
  const double c = phi1 / (2.0 * rho);
  if (!(c > -1.0 && c < 1.0))
    throw DomainError("cycle_from_coefficients: roots are real, no cycle frequency");
  return {rho, std::acos(c)};
}

DerivedEffects derived_effects(const ParameterVector& params) {
  const double rho = params[Param::Rho];
  const double phi1 = 2.0 * rho * std::cos(params[Param::Lambda]);
  const double phi2 = -rho * rho;
  const double theta0 = params[Param::Theta0];
  const double theta1 = params[Param::Theta1];
  DerivedEffects out;
  out.lag1_loading = theta0 * phi1 + theta1;
  out.lag2_loading = theta0 * phi2;
  out.change_effect = out.lag2_loading;
  out.level_effect = theta0 * (phi1 + phi2) + theta1;
  return out;
}

StateLayout state_layout(const ModelSpec& spec) {
  StateLayout l;
  int next = 0;
  l.mu = next++;
  if (spec.has_slope()) l.beta = next++;
  l.psi = next++;
  l.psi_lag = next++;
  if (spec.bivariate()) l.tau = next++;
  l.p = next;
  l.d = spec.bivariate() ? 2 : 1;
  return l;
}

StateSpaceModel build_model(const ModelSpec& spec, const ParameterVector& params,
                            double kappa_init, double lambda_max) {
  validate_parameters(spec, params, /*allow_zero_variances=*/true, lambda_max);
  const StateLayout l = state_layout(spec);
  const auto [phi1, phi2] = cycle_coefficients(params[Param::Rho], params[Param::Lambda], lambda_max);

  Matrix Z = Matrix::Zero(l.d, l.p);
  Z(0, l.mu) = 1.0;
  Z(0, l.psi) = 1.0;

  Matrix Sigma = Matrix::Zero(l.d, l.d);
  Sigma(0, 0) = params[Param::Sigma2Eps];

  Matrix T = Matrix::Zero(l.p, l.p);
  Matrix Omega = Matrix::Zero(l.p, l.p);
  Vector d_state = Vector::Zero(l.p);

  T(l.mu, l.mu) = 1.0;
  if (spec.trend != Trend::IRW) Omega(l.mu, l.mu) = params[Param::Sigma2Eta];
  if (l.beta >= 0) {
    T(l.mu, l.beta) = 1.0;
    T(l.beta, l.beta) = 1.0;
    Omega(l.beta, l.beta) = params[Param::Sigma2Zeta];
  }
  if (spec.trend == Trend::LLD) d_state(l.mu) = params[Param::Drift];

  const double s2_kappa = params[Param::Sigma2Kappa];
  T(l.psi, l.psi) = phi1;
  T(l.psi, l.psi_lag) = phi2;
  T(l.psi_lag, l.psi) = 1.0;
  Omega(l.psi, l.psi) = s2_kappa;

  if (spec.bivariate()) {
    const double theta0 = params[Param::Theta0];
    const double theta1 = params[Param::Theta1];
    Z(1, l.tau) = 1.0;
    Sigma(1, 1) = params[Param::Sigma2Vareps];
    T(l.tau, l.psi) = theta0 * phi1 + theta1;
    T(l.tau, l.psi_lag) = theta0 * phi2;
    T(l.tau, l.tau) = 1.0;
    Omega(l.psi, l.tau) = theta0 * s2_kappa;
    Omega(l.tau, l.psi) = theta0 * s2_kappa;
    Omega(l.tau, l.tau) = params[Param::Sigma2Xi] + theta0 * theta0 * s2_kappa;
  }

  return StateSpaceModel(Vector::Zero(l.d), std::move(d_state), std::move(Z), std::move(T),
                         std::move(Sigma), std::move(Omega), kappa_init);
}

SimulatedData simulate_data(const ModelSpec& spec, const ParameterVector& params, Eigen::Index n_obs,
                            RandomStream& rng, double init_scale, double lambda_max) {
  if (n_obs < 8) throw ValidationError("simulate_data: need at least 8 observations");
  const StateSpaceModel model = build_model(spec, params, kDefaultDiffuseScale, lambda_max);
  SimulatedPath path = simulate_state_space(model, n_obs, init_scale, rng);
  return {std::move(path.observations), std::move(path.states)};
}

}  // namespace ucgap
