#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ucgap/random.hpp"
#include "ucgap/statespace.hpp"

namespace ucgap {

enum class Variate { Univariate, Bivariate };

/// Trend specifications: local level, local level with fixed drift, local
/// trend, integrated random walk.
enum class Trend { LL, LLD, LT, IRW };

struct ModelSpec {
  Variate variate = Variate::Univariate;
  Trend trend = Trend::LT;

  bool bivariate() const { return variate == Variate::Bivariate; }
  bool has_slope() const { return trend == Trend::LT || trend == Trend::IRW; }

  /// "uni-lt", "biv-irw", ...
  std::string name() const;
  static ModelSpec parse(std::string_view name);

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Hyperparameters, listed in the order the sampler visits them.
enum class Param {
  Sigma2Eps,     // GDP measurement variance
  Sigma2Vareps,  // inflation measurement variance
  Sigma2Eta,     // trend level variance
  Drift,         // fixed drift (LLD)
  Sigma2Zeta,    // slope variance
  Theta1,        // lagged output-gap loading
  Theta0,        // contemporaneous output-gap loading
  Sigma2Xi,      // core-inflation innovation variance
  Rho,           // cycle amplitude
  Lambda,        // cycle frequency
  Sigma2Kappa,   // cycle innovation variance
};

inline constexpr std::size_t kParamCount = 11;
inline constexpr std::array<Param, kParamCount> kAllParams = {
    Param::Sigma2Eps, Param::Sigma2Vareps, Param::Sigma2Eta, Param::Drift,
    Param::Sigma2Zeta, Param::Theta1,      Param::Theta0,    Param::Sigma2Xi,
    Param::Rho,       Param::Lambda,       Param::Sigma2Kappa};

std::string_view param_name(Param p);
std::optional<Param> param_from_name(std::string_view name);
bool is_variance(Param p);

/// Whether the parameter exists under the specification.
bool is_active(const ModelSpec& spec, Param p);
std::vector<Param> active_params(const ModelSpec& spec);

struct ParameterVector {
  std::array<double, kParamCount> values{};

  double& operator[](Param p) { return values[static_cast<std::size_t>(p)]; }
  double operator[](Param p) const { return values[static_cast<std::size_t>(p)]; }

  friend bool operator==(const ParameterVector&, const ParameterVector&) = default;
};

/// Checks the mask and supports: active variances > 0 (>= 0 when
/// allow_zero_variances), rho in (0,1) (or [0,1)), lambda in (0, lambda_max).
/// Throws ValidationError naming the offending parameter.
void validate_parameters(const ModelSpec& spec, const ParameterVector& params,
                         bool allow_zero_variances = false,
                         double lambda_max = std::numbers::pi);

/// AR(2) coefficients of a stochastic cycle with amplitude rho and frequency
/// lambda: phi1 = 2 rho cos(lambda), phi2 = -rho^2.
std::pair<double, double> cycle_coefficients(double rho, double lambda,
                                             double lambda_max = std::numbers::pi);

/// Inverse of cycle_coefficients for phi2 in (-1, 0).
std::pair<double, double> cycle_from_coefficients(double phi1, double phi2);

struct DerivedEffects {
  double level_effect = 0.0;     // theta0 (phi1 + phi2) + theta1
  double change_effect = 0.0;    // theta0 phi2
  double lag1_loading = 0.0;     // theta0 phi1 + theta1
  double lag2_loading = 0.0;     // theta0 phi2
};
DerivedEffects derived_effects(const ParameterVector& params);

/// Positions of each component in the state vector; -1 when absent.
/// Canonical order is (mu, beta, psi, psi_lag, tau) with absent entries deleted.
struct StateLayout {
  int mu = 0;
  int beta = -1;
  int psi = -1;
  int psi_lag = -1;
  int tau = -1;
  int p = 0;
  int d = 1;
};
StateLayout state_layout(const ModelSpec& spec);

/// State-space form of the given specification.
StateSpaceModel build_model(const ModelSpec& spec, const ParameterVector& params,
                            double kappa_init = kDefaultDiffuseScale,
                            double lambda_max = std::numbers::pi);

struct SimulatedData {
  ObservationMatrix observations;  // T x d (y, and pi when bivariate)
  LatentStatePath states;          // T x p
};

/// Exact draw from the generative model. Variances may be zero; initial states
/// are N(0, init_scale I).
SimulatedData simulate_data(const ModelSpec& spec, const ParameterVector& params, Eigen::Index n_obs,
                            RandomStream& rng, double init_scale = 1.0,
                            double lambda_max = std::numbers::pi);

}  // namespace ucgap
