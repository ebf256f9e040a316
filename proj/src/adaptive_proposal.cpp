#include "ucgap/adaptive_proposal.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <limits>

#include "ucgap/errors.hpp"

namespace ucgap {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kMaxLogStep = 50.0;

double floored(double x) { return std::max(x, kProposalFloor); }

}  // namespace

double step_size(std::uint64_t i, double C, double exponent) {
  if (i < 1) throw DomainError("step_size: iteration index must be >= 1");
  return 1.0 / (C * std::pow(static_cast<double>(i), exponent));
}

AdaptiveProposal AdaptiveProposal::gaussian(double mean, double variance) {
  return {ProposalFamily::Gaussian, mean, variance, 1.0, 0, 0.0};
}

AdaptiveProposal AdaptiveProposal::inverse_gamma(double a, double b) {
  return {ProposalFamily::InverseGamma, a, b, 1.0, 0, 0.0};
}

AdaptiveProposal AdaptiveProposal::beta(double a, double b, double scale) {
  return {ProposalFamily::Beta, a, b, scale, 0, 0.0};
}

AdaptiveProposal AdaptiveProposal::from_prior(const Prior& prior) {
  switch (prior.family) {
    case PriorFamily::Gaussian: return gaussian(prior.a, prior.b);
    case PriorFamily::InverseGamma: return inverse_gamma(prior.a, prior.b);
    case PriorFamily::Beta: return beta(prior.a, prior.b, prior.scale);
  }
  return {};
}

double AdaptiveProposal::sample(RandomStream& rng) const {
  switch (family) {
    case ProposalFamily::Gaussian: return first + std::sqrt(second) * rng.normal();
    case ProposalFamily::InverseGamma: return rng.inverse_gamma(first, second);
    case ProposalFamily::Beta: return scale * rng.beta(first, second);
  }
  return 0.0;
}

double AdaptiveProposal::log_density(double x) const {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  switch (family) {
    case ProposalFamily::Gaussian: {
      const double z = x - first;
      return -0.5 * (kLog2Pi + std::log(second) + z * z / second);
    }
    case ProposalFamily::InverseGamma:
      if (!(x > 0.0)) return neg_inf;
      return first * std::log(second) - std::lgamma(first) - (first + 1.0) * std::log(x) -
             second / x;
    case ProposalFamily::Beta: {
      const double u = x / scale;
      if (!(u > 0.0 && u < 1.0)) return neg_inf;
      return (first - 1.0) * std::log(u) + (second - 1.0) * std::log1p(-u) - std::log(scale) -
             (std::lgamma(first) + std::lgamma(second) - std::lgamma(first + second));
    }
  }
  return neg_inf;
}

double AdaptiveProposal::mean() const {
  switch (family) {
    case ProposalFamily::Gaussian: return first;
    case ProposalFamily::InverseGamma:
      return first > 1.0 ? second / (first - 1.0) : std::numeric_limits<double>::infinity();
    case ProposalFamily::Beta: return scale * first / (first + second);
  }
  return 0.0;
}

AdaptiveProposal adapt_gaussian(const AdaptiveProposal& prop, double draw, double delta) {
  if (prop.family != ProposalFamily::Gaussian)
    throw StructuralError("adapt_gaussian: proposal is not Gaussian");
  AdaptiveProposal out = prop;
  out.first = prop.first + delta * (draw - prop.first);
  const double dev = draw - out.first;
  out.second = floored(prop.second + delta * (dev * dev - prop.second));
  out.updates = prop.updates + 1;
  out.last_change = std::max(std::abs(out.first - prop.first), std::abs(out.second - prop.second));
  return out;
}

AdaptiveProposal adapt_invgamma(const AdaptiveProposal& prop, double draw, double delta) {
  if (prop.family != ProposalFamily::InverseGamma)
    throw StructuralError("adapt_invgamma: proposal is not inverse gamma");
  if (!(draw > 0.0)) throw DomainError("adapt_invgamma: draw must be positive");
  const double a = prop.first;
  const double b = prop.second;
  AdaptiveProposal out = prop;
  out.first = floored(a + delta * (std::log(b / draw) - boost::math::digamma(a)));
  const double log_step = std::clamp(delta * (a - b / draw), -kMaxLogStep, kMaxLogStep);
  out.second = floored(b * std::exp(log_step));
  out.updates = prop.updates + 1;
  out.last_change = std::max(std::abs(out.first - a), std::abs(out.second - b));
  return out;
}

AdaptiveProposal adapt_beta(const AdaptiveProposal& prop, double draw, double delta) {
  if (prop.family != ProposalFamily::Beta)
    throw StructuralError("adapt_beta: proposal is not beta");
  const double u = draw / prop.scale;
  if (!(u > 0.0 && u < 1.0)) throw DomainError("adapt_beta: draw outside the open support");
  using boost::math::digamma;
  const double a = prop.first;
  const double b = prop.second;
  AdaptiveProposal out = prop;
  out.first = floored(a + delta * (std::log(u) + digamma(a + b) - digamma(a)));
  out.second = floored(b + delta * (std::log1p(-u) + digamma(out.first + b) - digamma(b)));
  out.updates = prop.updates + 1;
  out.last_change = std::max(std::abs(out.first - a), std::abs(out.second - b));
  return out;
}

AdaptiveProposal adapt(const AdaptiveProposal& prop, double draw, double delta) {
  switch (prop.family) {
    case ProposalFamily::Gaussian: return adapt_gaussian(prop, draw, delta);
    case ProposalFamily::InverseGamma: return adapt_invgamma(prop, draw, delta);
    case ProposalFamily::Beta: return adapt_beta(prop, draw, delta);
  }
  return prop;
}

}  // namespace ucgap
