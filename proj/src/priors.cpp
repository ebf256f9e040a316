#include "ucgap/priors.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "ucgap/errors.hpp"

namespace ucgap {
namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}  // namespace

double Prior::log_density(double x) const {
  if (!std::isfinite(x)) return kNegInf;
  switch (family) {
    case PriorFamily::InverseGamma:
      if (!(x > 0.0)) return kNegInf;
      return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
    case PriorFamily::Beta: {
      const double u = x / scale;
      if (!(u > 0.0 && u < 1.0)) return kNegInf;
      return (a - 1.0) * std::log(u) + (b - 1.0) * std::log1p(-u) - std::log(scale) -
             (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    }
    case PriorFamily::Gaussian: {
      const double z = x - a;
      return -0.5 * (kLog2Pi + std::log(b) + z * z / b);
    }
  }
  return kNegInf;
}

double Prior::cdf(double x) const {
  switch (family) {
    case PriorFamily::InverseGamma:
      if (!(x > 0.0)) return 0.0;
      return boost::math::gamma_q(a, b / x);
    case PriorFamily::Beta: {
      const double u = x / scale;
      if (u <= 0.0) return 0.0;
      if (u >= 1.0) return 1.0;
      return boost::math::ibeta(a, b, u);
    }
    case PriorFamily::Gaussian:
      return 0.5 * boost::math::erfc(-(x - a) / std::sqrt(2.0 * b));
  }
  return 0.0;
}

double Prior::mean() const {
  switch (family) {
    case PriorFamily::InverseGamma:
      return a > 1.0 ? b / (a - 1.0) : std::numeric_limits<double>::infinity();
    case PriorFamily::Beta:
      return scale * a / (a + b);
    case PriorFamily::Gaussian:
      return a;
  }
  return 0.0;
}

double Prior::sample(RandomStream& rng) const {
  switch (family) {
    case PriorFamily::InverseGamma:
      return rng.inverse_gamma(a, b);
    case PriorFamily::Beta:
      return scale * rng.beta(a, b);
    case PriorFamily::Gaussian:
      return a + std::sqrt(b) * rng.normal();
  }
  return 0.0;
}

void Prior::validate() const {
  const bool ok = family == PriorFamily::Gaussian
                      ? std::isfinite(a) && b > 0.0 && std::isfinite(b)
                      : a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b) &&
                            scale > 0.0 && std::isfinite(scale);
  if (!ok) throw ValidationError("prior hyperparameters must be finite and positive");
}

void PriorConfig::set_lambda_scale(LambdaScale s) {
  lambda_scale = s;
  (*this)[Param::Lambda].scale = lambda_support(s);
}

void PriorConfig::validate() const {
  for (Param p : kAllParams) {
    try {
      (*this)[p].validate();
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(param_name(p)) + ": " + e.what());
    }
    const PriorFamily fam = (*this)[p].family;
    if (is_variance(p) && fam != PriorFamily::InverseGamma)
      throw ValidationError(std::string(param_name(p)) + ": variance priors must be inverse gamma");
    if ((p == Param::Rho || p == Param::Lambda) && fam != PriorFamily::Beta)
      throw ValidationError(std::string(param_name(p)) + ": prior must be beta");
    if ((p == Param::Theta0 || p == Param::Theta1 || p == Param::Drift) &&
        fam != PriorFamily::Gaussian)
      throw ValidationError(std::string(param_name(p)) + ": prior must be gaussian");
  }
  if ((*this)[Param::Rho].scale != 1.0) throw ValidationError("rho prior must live on (0, 1)");
  if ((*this)[Param::Lambda].scale != lambda_max())
    throw ValidationError("lambda prior support does not match the lambda scale");
}

PriorConfig default_priors() {
  PriorConfig cfg;
  cfg[Param::Sigma2Eps] = Prior::inverse_gamma(3.0, 3.6e-3);
  cfg[Param::Sigma2Eta] = Prior::inverse_gamma(3.0, 4.0e-3);
  cfg[Param::Sigma2Zeta] = Prior::inverse_gamma(3.0, 4.0e-4);
  cfg[Param::Sigma2Vareps] = Prior::inverse_gamma(3.0, 3.2e-4);
  cfg[Param::Sigma2Xi] = Prior::inverse_gamma(3.0, 3.2e-4);
  cfg[Param::Sigma2Kappa] = Prior::inverse_gamma(2.40, 2.82);
  cfg[Param::Rho] = Prior::beta(2.0, 3.0);
  cfg[Param::Lambda] = Prior::beta(5.54, 27.72, std::numbers::pi);
  cfg[Param::Theta0] = Prior::gaussian(0.0, 100.0);
  cfg[Param::Theta1] = Prior::gaussian(0.0, 100.0);
  cfg[Param::Drift] = Prior::gaussian(0.0, 100.0);
  cfg.lambda_scale = LambdaScale::Pi;
  return cfg;
}

double log_prior_density(const ModelSpec& spec, const ParameterVector& params,
                         const PriorConfig& cfg) {
  double total = 0.0;
  for (Param p : active_params(spec)) {
    const double lp = cfg[p].log_density(params[p]);
    if (lp == kNegInf) return kNegInf;
    total += lp;
  }
  return total;
}

ParameterVector sample_prior(const ModelSpec& spec, const PriorConfig& cfg, RandomStream& rng) {
  ParameterVector out;
  for (Param p : active_params(spec)) out[p] = cfg[p].sample(rng);
  return out;
}

ParameterVector prior_means(const ModelSpec& spec, const PriorConfig& cfg) {
  ParameterVector out;
  for (Param p : active_params(spec)) out[p] = cfg[p].mean();
  return out;
}

}  // namespace ucgap
