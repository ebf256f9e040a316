#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "ucgap/diagnostics.hpp"
#include "ucgap/errors.hpp"

using namespace ucgap;

namespace {

Vector iid_normal(std::mt19937_64& gen, Eigen::Index n) {
  std::normal_distribution<double> nd;
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = nd(gen);
  return x;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("hpd on small explicit samples") {
  Vector x(100);
  for (int i = 0; i < 100; ++i) x(i) = i;
  Interval iv = hpd_interval(x, 0.95);
  CHECK(iv.lower == 0.0);
  CHECK(iv.upper == 94.0);
  iv = hpd_interval(x, 1.0);
  CHECK(iv.lower == 0.0);
  CHECK(iv.upper == 99.0);

  // A long right tail pushes the interval to the dense left end.
  for (int i = 95; i < 100; ++i) x(i) = 1000.0 + i;
  iv = hpd_interval(x, 0.95);
  CHECK(iv.lower == 0.0);
  CHECK(iv.upper == 94.0);
  for (int i = 0; i < 5; ++i) x(i) = -1000.0 - i;
  iv = hpd_interval(x, 0.90);
  CHECK(iv.lower == 5.0);
  CHECK(iv.upper == 94.0);

  CHECK_THROWS_AS(hpd_interval(Vector::Zero(99)), StructuralError);
  CHECK_THROWS_AS(hpd_interval(Vector::Zero(200), 0.0), StructuralError);
  CHECK_THROWS_AS(hpd_interval(Vector::Zero(200), 1.5), StructuralError);
}

TEST_CASE("hpd matches exhaustive enumeration") {
  std::mt19937_64 gen(77);
  std::gamma_distribution<double> gd(2.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index n = 100 + rep * 3;
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = rep % 3 == 0 ? std::round(gd(gen) * 4) : gd(gen);
    for (double level : {0.5, 0.9, 0.95}) {
      const Interval iv = hpd_interval(x, level);
      const auto [lo, hi] = oracle::hpd_exhaustive(to_std(x), level);
      CHECK(iv.lower == lo);
      CHECK(iv.upper == hi);
    }
  }
}

TEST_CASE("hpd of a large gaussian sample") {
  std::mt19937_64 gen(1);
  const Interval iv = hpd_interval(iid_normal(gen, 200000), 0.95);
  CHECK(std::abs(iv.lower + 1.959964) < 0.02);
  CHECK(std::abs(iv.upper - 1.959964) < 0.02);
}

TEST_CASE("hpd is equivariant under increasing affine maps") {
  std::mt19937_64 gen(3);
  const Vector x = iid_normal(gen, 500);
  const Interval a = hpd_interval(x);
  const Interval b = hpd_interval((3.0 * x.array() + 2.0).matrix());
  CHECK(b.lower == doctest::Approx(3.0 * a.lower + 2.0));
  CHECK(b.upper == doctest::Approx(3.0 * a.upper + 2.0));
}

TEST_CASE("geweke on stationary and broken chains") {
  std::mt19937_64 gen(4);
  int large = 0;
  for (int rep = 0; rep < 200; ++rep)
    if (std::abs(geweke_z(iid_normal(gen, 2000))) > 3.0) ++large;
  CHECK(large <= 4);

  Vector broken = iid_normal(gen, 5000);
  broken.head(500).array() += 1.0;
  CHECK(geweke_z(broken) > 5.0);

  const Vector x = iid_normal(gen, 3000);
  const double z = geweke_z(x);
  CHECK(geweke_z((2.5 * x.array() - 7.0).matrix()) == doctest::Approx(z).epsilon(1e-9));
  CHECK(geweke_z((-2.5 * x.array() + 1.0).matrix()) == doctest::Approx(-z).epsilon(1e-9));

  CHECK_THROWS_AS(geweke_z(Vector::Zero(999)), StructuralError);
  CHECK_THROWS_AS(geweke_z(Vector::Constant(2000, 1.0)), NumericalError);
}

TEST_CASE("spectral density at zero of white noise") {
  std::mt19937_64 gen(5);
  const Vector x = iid_normal(gen, 100000);
  CHECK(std::abs(spectral_density_zero(x) - 1.0) < 0.05);
  // AR(1) with coefficient 0.5: long-run variance 1 / (1 - 0.5)^2 = 4.
  Vector ar(100000);
  ar(0) = x(0);
  for (Eigen::Index i = 1; i < ar.size(); ++i) ar(i) = 0.5 * ar(i - 1) + x(i);
  CHECK(std::abs(spectral_density_zero(ar) / 4.0 - 1.0) < 0.1);
}

TEST_CASE("autocorrelation and effective sample size") {
  std::mt19937_64 gen(6);
  const Vector e = iid_normal(gen, 50000);
  Vector ar(e.size());
  ar(0) = e(0);
  for (Eigen::Index i = 1; i < ar.size(); ++i) ar(i) = 0.8 * ar(i - 1) + e(i);
  const Vector acf = autocorrelation(ar, 5);
  CHECK(acf(0) == 1.0);
  for (int k = 1; k <= 5; ++k) CHECK(std::abs(acf(k) - std::pow(0.8, k)) < 0.03);
  // ESS of an AR(1) is about n (1 - phi) / (1 + phi).
  CHECK(std::abs(effective_sample_size(ar) / (50000.0 / 9.0) - 1.0) < 0.2);
  CHECK(std::abs(effective_sample_size(e) / 50000.0 - 1.0) < 0.1);
  CHECK(std::isnan(autocorrelation(Vector::Constant(10, 2.0), 3)(1)));
}

TEST_CASE("maximum a posteriori draw") {
  PosteriorDraws d;
  d.spec = ModelSpec::parse("uni-ll");
  d.params = active_params(d.spec);
  d.draws = Matrix::Zero(5, static_cast<Eigen::Index>(d.params.size()));
  for (Eigen::Index i = 0; i < 5; ++i) d.draws.row(i).setConstant(static_cast<double>(i));
  d.log_posterior.resize(5);
  d.log_posterior << -3.0, -1.0, -2.0, -1.0, -5.0;
  CHECK(map_index(d) == 1);
  CHECK(map_estimate(d)[d.params.front()] == 1.0);
  d.draws.resize(0, d.draws.cols());
  d.log_posterior.resize(0);
  CHECK_THROWS_AS(map_index(d), StructuralError);
}

TEST_CASE("maximum a posteriori draw sits near the analytic mode") {
  // Draws from N(2, 0.25) scored with their own log density.
  std::mt19937_64 gen(8);
  PosteriorDraws d;
  d.spec = ModelSpec::parse("uni-ll");
  d.params = active_params(d.spec);
  const Eigen::Index n = 20000;
  d.draws = Matrix::Zero(n, static_cast<Eigen::Index>(d.params.size()));
  d.log_posterior.resize(n);
  const Vector z = iid_normal(gen, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.draws(i, 0) = 2.0 + 0.5 * z(i);
    d.log_posterior(i) = -0.5 * z(i) * z(i);
  }
  CHECK(std::abs(map_estimate(d)[d.params.front()] - 2.0) < 0.01);
}

TEST_CASE("derived effect draws") {
  PosteriorDraws d;
  d.spec = ModelSpec::parse("biv-ll");
  d.params = active_params(d.spec);
  d.draws = Matrix::Zero(2, static_cast<Eigen::Index>(d.params.size()));
  d.log_posterior = Vector::Zero(2);
  const auto col = [&](Param p) {
    for (std::size_t k = 0; k < d.params.size(); ++k)
      if (d.params[k] == p) return static_cast<Eigen::Index>(k);
    return Eigen::Index{-1};
  };
  d.draws(0, col(Param::Rho)) = 0.8992;
  d.draws(0, col(Param::Lambda)) = 0.54;
  d.draws(0, col(Param::Theta0)) = 0.1;
  d.draws(0, col(Param::Theta1)) = 0.05;
  d.draws(1, col(Param::Rho)) = 0.5;
  d.draws(1, col(Param::Lambda)) = 1.0;
  const DerivedEffectDraws e = derived_effect_draws(d);
  const auto [phi1, phi2] = cycle_coefficients(0.8992, 0.54);
  CHECK(e.level_effect(0) == doctest::Approx(0.1 * (phi1 + phi2) + 0.05));
  CHECK(e.lag1_loading(0) == doctest::Approx(0.1 * phi1 + 0.05));
  CHECK(e.change_effect(0) == doctest::Approx(0.1 * phi2));
  CHECK(e.level_effect(1) == 0.0);
  CHECK(e.lag1_loading(0) + e.lag2_loading(0) == doctest::Approx(e.level_effect(0)));

  d.spec = ModelSpec::parse("uni-ll");
  CHECK_THROWS_AS(derived_effect_draws(d), StructuralError);
}

TEST_CASE("summary rows") {
  std::mt19937_64 gen(9);
  const Vector x = iid_normal(gen, 2000);
  const SummaryRow r = summarize_column("rho", x, 0.25);
  CHECK(r.param == "rho");
  CHECK(r.mean == doctest::Approx(x.mean()));
  CHECK(r.map == 0.25);
  CHECK(r.hpd_lower < r.hpd_upper);
  CHECK(std::isfinite(r.geweke));
  const SummaryRow few = summarize_column("rho", x.head(50), 0.0);
  CHECK(std::isnan(few.hpd_lower));
  CHECK(std::isnan(few.geweke));
  const SummaryRow flat = summarize_column("rho", Vector::Constant(2000, 1.0), 1.0);
  CHECK(flat.std_dev == 0.0);
  CHECK(std::isnan(flat.geweke));
}

TEST_CASE("hp filter") {
  CHECK(hp_filter(Vector::Constant(40, 3.0)).isApprox(Vector::Constant(40, 3.0), 1e-10));
  Vector line(40);
  for (int i = 0; i < 40; ++i) line(i) = 1.0 + 0.5 * i;
  CHECK((hp_filter(line) - line).cwiseAbs().maxCoeff() < 1e-9);

  std::mt19937_64 gen(10);
  for (double lambda : {1.0, 1600.0, 1e5}) {
    const Vector y = iid_normal(gen, 120).cwiseProduct(Vector::Constant(120, 2.0));
    CHECK((hp_filter(y, lambda) - oracle::hp_dense(y, lambda)).cwiseAbs().maxCoeff() < 1e-8);
  }
  CHECK_THROWS_AS(hp_filter(Vector::Zero(4)), StructuralError);
}

TEST_CASE("hp filter equals the smoothed integrated random walk") {
  std::mt19937_64 gen(11);
  const Eigen::Index n = 200;
  Vector y(n);
  y(0) = 0.0;
  const Vector e = iid_normal(gen, n);
  for (Eigen::Index i = 1; i < n; ++i) y(i) = y(i - 1) + e(i);
  Matrix T(2, 2);
  T << 1.0, 1.0, 0.0, 1.0;
  Matrix Z(1, 2);
  Z << 1.0, 0.0;
  Matrix Omega = Matrix::Zero(2, 2);
  Omega(1, 1) = 1.0 / 1600.0;
  const StateSpaceModel m(Vector::Zero(1), Vector::Zero(2), Z, T, Matrix::Identity(1, 1), Omega);
  const SmootherOutput s = kalman_smoother(m, kalman_filter(m, y));
  const Vector hp = hp_filter(y, 1600.0);
  double worst = 0.0;
  for (Eigen::Index t = 20; t < n - 20; ++t) worst = std::max(worst, std::abs(s.mean(t, 0) - hp(t)));
  CHECK(worst < 1e-6);
}

TEST_CASE("turning points") {
  Vector s(64);
  for (int t = 0; t < 64; ++t) s(t) = std::sin(2 * std::numbers::pi * t / 16.0);
  const std::vector<TurningPoint> tp = turning_points(s);
  REQUIRE(tp.size() == 8);
  for (std::size_t k = 0; k < tp.size(); ++k) {
    CHECK(tp[k].index == static_cast<Eigen::Index>(4 + 8 * k));
    CHECK(tp[k].kind == (k % 2 == 0 ? TurningKind::Peak : TurningKind::Trough));
  }
  Vector mono(30);
  for (int t = 0; t < 30; ++t) mono(t) = t * t;
  CHECK(turning_points(mono).empty());
  CHECK(turning_points(Vector::Constant(30, 1.0)).empty());

  // Two peaks in a row keep the higher one.
  Vector twin(20);
  twin << 0, 1, 3, 2, 2.5, 2, 4, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0;
  std::vector<TurningPoint> tw = turning_points(twin);
  REQUIRE(!tw.empty());
  CHECK(tw.front().index == 6);
  for (std::size_t k = 1; k < tw.size(); ++k) CHECK(tw[k].kind != tw[k - 1].kind);
}

TEST_CASE("correlation and path bands") {
  std::mt19937_64 gen(12);
  const Vector a = iid_normal(gen, 1000);
  CHECK(correlation(a, 2.0 * a) == doctest::Approx(1.0));
  CHECK(correlation(a, -a) == doctest::Approx(-1.0));

  Matrix paths(200, 3);
  for (int r = 0; r < 200; ++r) paths.row(r) << r, 2.0 * r, 1.0;
  const PathBand b = path_band(paths, 0.9);
  CHECK(b.mean(0) == doctest::Approx(99.5));
  CHECK(b.upper(1) - b.lower(1) == doctest::Approx(2.0 * (b.upper(0) - b.lower(0))));
  CHECK(b.lower(2) == 1.0);
  CHECK(b.upper(2) == 1.0);
  const PathBand small = path_band(paths.topRows(20), 0.9);
  CHECK(small.lower(0) <= small.upper(0));
}
