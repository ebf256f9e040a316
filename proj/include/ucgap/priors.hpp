#pragma once

#include <array>
#include <numbers>

#include "ucgap/models.hpp"
#include "ucgap/random.hpp"

namespace ucgap {

enum class PriorFamily { InverseGamma, Beta, Gaussian };

/// One univariate prior.
///   InverseGamma(a, b): density proportional to x^{-(a+1)} exp(-b/x), mean b/(a-1).
///   Beta(a, b) on (0, scale): x/scale ~ Beta(a, b).
///   Gaussian(a = mean, b = variance).
struct Prior {
  PriorFamily family = PriorFamily::Gaussian;
  double a = 0.0;
  double b = 1.0;
  double scale = 1.0;

  static Prior inverse_gamma(double shape, double scale_param) {
    return {PriorFamily::InverseGamma, shape, scale_param, 1.0};
  }
  static Prior beta(double a, double b, double support = 1.0) {
    return {PriorFamily::Beta, a, b, support};
  }
  static Prior gaussian(double mean, double variance) {
    return {PriorFamily::Gaussian, mean, variance, 1.0};
  }

  /// Log density; -infinity outside the support.
  double log_density(double x) const;
  double cdf(double x) const;
  double mean() const;
  double sample(RandomStream& rng) const;
  /// Throws ValidationError on non-positive hyperparameters.
  void validate() const;

  friend bool operator==(const Prior&, const Prior&) = default;
};

/// Which support the lambda prior uses: (0, pi) or (0, 2 pi).
enum class LambdaScale { Pi, TwoPi };

inline double lambda_support(LambdaScale s) {
  return s == LambdaScale::Pi ? std::numbers::pi : 2.0 * std::numbers::pi;
}

struct PriorConfig {
  std::array<Prior, kParamCount> priors{};
  LambdaScale lambda_scale = LambdaScale::Pi;

  Prior& operator[](Param p) { return priors[static_cast<std::size_t>(p)]; }
  const Prior& operator[](Param p) const { return priors[static_cast<std::size_t>(p)]; }

  double lambda_max() const { return lambda_support(lambda_scale); }
  /// Re-scales the lambda Beta prior to the chosen support.
  void set_lambda_scale(LambdaScale s);
  void validate() const;

  friend bool operator==(const PriorConfig&, const PriorConfig&) = default;
};

/// Default hyperparameters for the bivariate model, plus a diffuse N(0, 100)
/// prior on the LLD drift.
PriorConfig default_priors();

/// Sum of the active blocks' log prior densities; -infinity outside the support.
double log_prior_density(const ModelSpec& spec, const ParameterVector& params,
                         const PriorConfig& cfg);

/// One independent draw per active block; inactive entries are zero.
ParameterVector sample_prior(const ModelSpec& spec, const PriorConfig& cfg, RandomStream& rng);

/// Prior means of the active blocks.
ParameterVector prior_means(const ModelSpec& spec, const PriorConfig& cfg);

}  // namespace ucgap
