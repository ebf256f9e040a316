#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ucgap/models.hpp"
#include "ucgap/sampler.hpp"
#include "ucgap/statespace.hpp"

namespace ucgap {

inline constexpr Eigen::Index kMinHpdDraws = 100;
inline constexpr Eigen::Index kMinGewekeDraws = 1000;

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Shortest window holding ceil(level n) sorted draws; ties go to the lowest
/// window. Requires n >= 100 and level in (0, 1].
Interval hpd_interval(const Vector& draws, double level = 0.95);

/// Spectral density at frequency zero by a Bartlett lag window with bandwidth
/// floor(n^{1/3}).
double spectral_density_zero(const Vector& x);

/// Geweke z comparing the first 10% with the last 50%. Requires n >= 1000.
/// Throws NumericalError when either window has zero variance.
double geweke_z(const Vector& draws, double first = 0.1, double last = 0.5);

/// Sample autocorrelations at lags 0..max_lag (lag 0 is 1). A constant
/// series yields NaN beyond lag 0.
Vector autocorrelation(const Vector& x, Eigen::Index max_lag = 50);

/// n / (1 + 2 sum of autocorrelations), summing up to the first negative lag.
double effective_sample_size(const Vector& x, Eigen::Index max_lag = 50);

/// Kept draw with the highest stored log joint posterior.
ParameterVector map_estimate(const PosteriorDraws& draws);
Eigen::Index map_index(const PosteriorDraws& draws);

/// Per-draw derived Phillips-curve effects (bivariate specs only).
struct DerivedEffectDraws {
  Vector level_effect;
  Vector change_effect;
  Vector lag1_loading;
  Vector lag2_loading;
};
DerivedEffectDraws derived_effect_draws(const PosteriorDraws& draws);

struct SummaryRow {
  std::string param;
  double mean = 0.0;
  double std_dev = 0.0;
  double map = 0.0;
  double hpd_lower = 0.0;
  double hpd_upper = 0.0;
  double geweke = 0.0;  // NaN when the chain is too short or degenerate
};

/// Summary of one column of draws; `map_value` is taken from the MaP draw.
SummaryRow summarize_column(const std::string& name, const Vector& draws, double map_value,
                            double level = 0.95);

/// Rows for every sampled parameter, plus the derived effects for bivariate specs.
std::vector<SummaryRow> summarize(const PosteriorDraws& draws, double level = 0.95);

/// Hodrick-Prescott trend: argmin sum (y - mu)^2 + smoothing sum (D2 mu)^2.
Vector hp_filter(const Vector& series, double smoothing = 1600.0);

enum class TurningKind { Peak, Trough };

struct TurningPoint {
  Eigen::Index index = 0;
  TurningKind kind = TurningKind::Peak;
};

/// Local extrema over a +-2 window, alternating, at least 2 quarters apart.
std::vector<TurningPoint> turning_points(const Vector& cycle, Eigen::Index half_window = 2,
                                         Eigen::Index min_separation = 2);

/// Pearson correlation.
double correlation(const Vector& a, const Vector& b);

/// Pointwise mean and HPD band over the rows of a path matrix (draws x T).
struct PathBand {
  Vector mean;
  Vector lower;
  Vector upper;
};
PathBand path_band(const Matrix& paths, double level = 0.95);

}  // namespace ucgap
