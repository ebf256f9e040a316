#include "ucgap/diagnostics.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ucgap/errors.hpp"

namespace ucgap {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(const Vector& x) { return x.size() == 0 ? kNaN : x.mean(); }

double sample_std(const Vector& x) {
  if (x.size() < 2) return kNaN;
  const double m = x.mean();
  return std::sqrt((x.array() - m).square().sum() / static_cast<double>(x.size() - 1));
}

Interval equal_tailed(std::vector<double> v, double level) {
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(v.size());
  const auto lo = static_cast<std::size_t>(std::floor(0.5 * (1.0 - level) * (n - 1.0)));
  const auto hi = static_cast<std::size_t>(std::ceil((1.0 - 0.5 * (1.0 - level)) * (n - 1.0)));
  return {v[lo], v[std::min(hi, v.size() - 1)]};
}

}  // namespace

Interval hpd_interval(const Vector& draws, double level) {
  const Eigen::Index n = draws.size();
  if (n < kMinHpdDraws)
    throw StructuralError("hpd_interval: need at least " + std::to_string(kMinHpdDraws) +
                          " draws, got " + std::to_string(n));
  if (!(level > 0.0 && level <= 1.0)) throw StructuralError("hpd_interval: level must lie in (0, 1]");
  std::vector<double> s(draws.data(), draws.data() + n);
  std::sort(s.begin(), s.end());
  // Guard against level * n landing a hair above an integer.
  const auto k = static_cast<Eigen::Index>(std::ceil(level * static_cast<double>(n) - 1e-9));
  const Eigen::Index width_count = std::clamp<Eigen::Index>(k, 1, n);
  std::size_t best = 0;
  double best_width = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i + width_count <= n; ++i) {
    const double w = s[static_cast<std::size_t>(i + width_count - 1)] - s[static_cast<std::size_t>(i)];
    if (w < best_width) {
      best_width = w;
      best = static_cast<std::size_t>(i);
    }
  }
  return {s[best], s[best + static_cast<std::size_t>(width_count) - 1]};
}

double spectral_density_zero(const Vector& x) {
  const Eigen::Index n = x.size();
  if (n < 2) throw StructuralError("spectral_density_zero: need at least two points");
  const Eigen::Index bandwidth = static_cast<Eigen::Index>(std::floor(std::cbrt(static_cast<double>(n))));
  const Vector c = x.array() - x.mean();
  const auto nd = static_cast<double>(n);
  double s = c.squaredNorm() / nd;
  for (Eigen::Index k = 1; k <= bandwidth && k < n; ++k) {
    const double gamma_k = c.head(n - k).dot(c.tail(n - k)) / nd;
    s += 2.0 * (1.0 - static_cast<double>(k) / static_cast<double>(bandwidth + 1)) * gamma_k;
  }
  return s;
}

double geweke_z(const Vector& draws, double first, double last) {
  const Eigen::Index n = draws.size();
  if (n < kMinGewekeDraws)
    throw StructuralError("geweke_z: need at least " + std::to_string(kMinGewekeDraws) +
                          " draws, got " + std::to_string(n));
  if (!(first > 0.0 && last > 0.0 && first + last <= 1.0))
    throw StructuralError("geweke_z: windows must be positive and non-overlapping");
  const auto n_a = static_cast<Eigen::Index>(std::floor(first * static_cast<double>(n)));
  const auto n_b = static_cast<Eigen::Index>(std::floor(last * static_cast<double>(n)));
  const Vector a = draws.head(n_a);
  const Vector b = draws.tail(n_b);
  const double s_a = spectral_density_zero(a);
  const double s_b = spectral_density_zero(b);
  const double var = s_a / static_cast<double>(n_a) + s_b / static_cast<double>(n_b);
  if (!(var > 0.0)) throw NumericalError("geweke_z: degenerate chain, zero variance in a window");
  return (a.mean() - b.mean()) / std::sqrt(var);
}

Vector autocorrelation(const Vector& x, Eigen::Index max_lag) {
  const Eigen::Index n = x.size();
  const Eigen::Index lags = std::min<Eigen::Index>(max_lag, std::max<Eigen::Index>(n - 1, 0));
  Vector out(lags + 1);
  if (n == 0) return Vector::Constant(1, kNaN);
  const Vector c = x.array() - x.mean();
  const double g0 = c.squaredNorm();
  out(0) = 1.0;
  for (Eigen::Index k = 1; k <= lags; ++k) {
    out(k) = g0 > 0.0 ? c.head(n - k).dot(c.tail(n - k)) / g0 : kNaN;
  }
  return out;
}

double effective_sample_size(const Vector& x, Eigen::Index max_lag) {
  const Vector rho = autocorrelation(x, max_lag);
  const auto n = static_cast<double>(x.size());
  if (rho.size() < 2 || std::isnan(rho(1))) return n;
  double sum = 0.0;
  for (Eigen::Index k = 1; k < rho.size(); ++k) {
    if (rho(k) < 0.0) break;
    sum += rho(k);
  }
  return n / (1.0 + 2.0 * sum);
}

Eigen::Index map_index(const PosteriorDraws& draws) {
  if (draws.n_keep() == 0) throw StructuralError("map_estimate: no kept draws");
  if (draws.log_posterior.size() != draws.n_keep())
    throw StructuralError("map_estimate: log posterior not stored for every draw");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < draws.n_keep(); ++i) {
    if (draws.log_posterior(i) > draws.log_posterior(best)) best = i;
  }
  return best;
}

ParameterVector map_estimate(const PosteriorDraws& draws) { return draws.row(map_index(draws)); }

DerivedEffectDraws derived_effect_draws(const PosteriorDraws& draws) {
  if (!draws.spec.bivariate())
    throw StructuralError("derived effects need a bivariate spec, got " + draws.spec.name());
  const Eigen::Index n = draws.n_keep();
  DerivedEffectDraws out{Vector(n), Vector(n), Vector(n), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const DerivedEffects e = derived_effects(draws.row(i));
    out.level_effect(i) = e.level_effect;
    out.change_effect(i) = e.change_effect;
    out.lag1_loading(i) = e.lag1_loading;
    out.lag2_loading(i) = e.lag2_loading;
  }
  return out;
}

SummaryRow summarize_column(const std::string& name, const Vector& draws, double map_value,
                            double level) {
  SummaryRow row;
  row.param = name;
  row.mean = mean_of(draws);
  row.std_dev = sample_std(draws);
  row.map = map_value;
  row.hpd_lower = row.hpd_upper = kNaN;
  row.geweke = kNaN;
  if (draws.size() >= kMinHpdDraws) {
    const Interval hpd = hpd_interval(draws, level);
    row.hpd_lower = hpd.lower;
    row.hpd_upper = hpd.upper;
  }
  if (draws.size() >= kMinGewekeDraws) {
    try {
      row.geweke = geweke_z(draws);
    } catch (const NumericalError&) {
      // degenerate chain: reported as NaN
    }
  }
  return row;
}

std::vector<SummaryRow> summarize(const PosteriorDraws& draws, double level) {
  std::vector<SummaryRow> rows;
  if (draws.n_keep() == 0) return rows;
  const Eigen::Index best = map_index(draws);
  for (std::size_t j = 0; j < draws.params.size(); ++j) {
    const Vector col = draws.draws.col(static_cast<Eigen::Index>(j));
    rows.push_back(summarize_column(std::string(param_name(draws.params[j])), col, col(best), level));
  }
  if (draws.spec.bivariate()) {
    const DerivedEffectDraws e = derived_effect_draws(draws);
    rows.push_back(summarize_column("level_effect", e.level_effect, e.level_effect(best), level));
    rows.push_back(summarize_column("lag1_loading", e.lag1_loading, e.lag1_loading(best), level));
    rows.push_back(summarize_column("change_effect", e.change_effect, e.change_effect(best), level));
  }
  return rows;
}

Vector hp_filter(const Vector& series, double smoothing) {
  const Eigen::Index n = series.size();
  if (n < 5) throw StructuralError("hp_filter: need at least 5 observations");
  if (!(smoothing > 0.0) || !std::isfinite(smoothing))
    throw StructuralError("hp_filter: smoothing must be positive and finite");

  // I + smoothing D'D, D the (n-2) x n second-difference operator.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(5 * n));
  for (Eigen::Index i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
  const double w[3] = {1.0, -2.0, 1.0};
  for (Eigen::Index r = 0; r + 2 < n; ++r) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) trip.emplace_back(r + a, r + b, smoothing * w[a] * w[b]);
    }
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw NumericalError("hp_filter: factorization failed");
  Vector trend = solver.solve(series);
  if (solver.info() != Eigen::Success || !trend.allFinite())
    throw NumericalError("hp_filter: solve failed");
  return trend;
}

std::vector<TurningPoint> turning_points(const Vector& cycle, Eigen::Index half_window,
                                         Eigen::Index min_separation) {
  const Eigen::Index n = cycle.size();
  if (n < 5) throw StructuralError("turning_points: need at least 5 observations");
  std::vector<TurningPoint> out;
  for (Eigen::Index i = half_window; i + half_window < n; ++i) {
    const double c = cycle(i);
    bool peak = c > cycle(i - 1);
    bool trough = c < cycle(i - 1);
    for (Eigen::Index j = i - half_window; j <= i + half_window; ++j) {
      if (j == i) continue;
      peak = peak && c >= cycle(j);
      trough = trough && c <= cycle(j);
    }
    if (!peak && !trough) continue;
    const TurningPoint tp{i, peak ? TurningKind::Peak : TurningKind::Trough};

    if (!out.empty() && out.back().kind == tp.kind) {
      // Same kind twice: keep the more extreme one.
      const double prev = cycle(out.back().index);
      const bool better = tp.kind == TurningKind::Peak ? c > prev : c < prev;
      if (better) out.back() = tp;
      continue;
    }
    if (!out.empty() && tp.index - out.back().index < min_separation) {
      out.pop_back();
      continue;
    }
    out.push_back(tp);
  }
  return out;
}

double correlation(const Vector& a, const Vector& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw StructuralError("correlation: vectors must have equal length >= 2");
  const Vector ca = a.array() - a.mean();
  const Vector cb = b.array() - b.mean();
  const double den = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
  return den > 0.0 ? ca.dot(cb) / den : kNaN;
}

PathBand path_band(const Matrix& paths, double level) {
  const Eigen::Index n_draws = paths.rows();
  const Eigen::Index n_t = paths.cols();
  PathBand out{Vector(n_t), Vector(n_t), Vector(n_t)};
  if (n_draws == 0) {
    out.mean.setConstant(kNaN);
    out.lower.setConstant(kNaN);
    out.upper.setConstant(kNaN);
    return out;
  }
  for (Eigen::Index t = 0; t < n_t; ++t) {
    const Vector col = paths.col(t);
    out.mean(t) = col.mean();
    // Too few stored paths for an HPD scan: equal-tailed band instead.
    const Interval iv = n_draws >= kMinHpdDraws
                            ? hpd_interval(col, level)
                            : equal_tailed(std::vector<double>(col.data(), col.data() + n_draws), level);
    out.lower(t) = iv.lower;
    out.upper(t) = iv.upper;
  }
  return out;
}

}  // namespace ucgap
