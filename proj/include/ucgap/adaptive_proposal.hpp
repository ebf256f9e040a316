#pragma once

#include <cstdint>

#include "ucgap/priors.hpp"
#include "ucgap/random.hpp"

namespace ucgap {

inline constexpr double kDefaultAdaptationConstant = 10.0;
inline constexpr double kDefaultAdaptationExponent = 0.5;
/// Lower bound applied to adapted shape/scale/variance parameters.
inline constexpr double kProposalFloor = 1e-4;

/// Robbins-Monro gain 1 / (C i^exponent), i >= 1.
double step_size(std::uint64_t i, double C = kDefaultAdaptationConstant,
                 double exponent = kDefaultAdaptationExponent);

enum class ProposalFamily { Gaussian, InverseGamma, Beta };

/// Independence proposal for one parameter block. Parameters are
/// (mean, variance) for Gaussian and (a, b) for InverseGamma / Beta; Beta
/// proposals live on (0, scale).
struct AdaptiveProposal {
  ProposalFamily family = ProposalFamily::Gaussian;
  double first = 0.0;
  double second = 1.0;
  double scale = 1.0;
  std::uint64_t updates = 0;
  double last_change = 0.0;  // max |parameter change| of the latest update

  static AdaptiveProposal gaussian(double mean, double variance);
  static AdaptiveProposal inverse_gamma(double a, double b);
  static AdaptiveProposal beta(double a, double b, double scale = 1.0);
  /// Same family and parameters as the prior.
  static AdaptiveProposal from_prior(const Prior& prior);

  double sample(RandomStream& rng) const;
  double log_density(double x) const;
  double mean() const;
};

/// mean += delta (x - mean); variance += delta ((x - mean_new)^2 - variance).
AdaptiveProposal adapt_gaussian(const AdaptiveProposal& prop, double draw, double delta);

/// Stochastic-approximation step towards the KL-closest inverse gamma:
///   a += delta [log(b/x) - digamma(a)]
///   b *= exp(delta [a - b/x])    (the b-score a/b - 1/x taken on the log-b scale)
AdaptiveProposal adapt_invgamma(const AdaptiveProposal& prop, double draw, double delta);

/// Beta moment-matching recursions on u = x / scale:
///   a += delta [log u + digamma(a + b) - digamma(a)]
///   b += delta [log(1 - u) + digamma(a_new + b) - digamma(b)]
AdaptiveProposal adapt_beta(const AdaptiveProposal& prop, double draw, double delta);

/// Dispatches on the proposal family.
AdaptiveProposal adapt(const AdaptiveProposal& prop, double draw, double delta);

}  // namespace ucgap
