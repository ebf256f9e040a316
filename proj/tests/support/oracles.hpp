#pragma once
// Independent reference computations used by the tests. Nothing here calls
// the recursive filter code: everything is built from dense stacked Gaussians
// or closed forms.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ucgap/statespace.hpp"

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Joint Gaussian of the stacked observations and states of a state-space model.
struct JointGaussian {
  Vector state_mean;  // (T p)
  Matrix state_cov;   // (T p) x (T p)
  Vector obs_mean;    // (T d)
  Matrix obs_cov;     // (T d) x (T d)
  Matrix cross;       // Cov(states, obs), (T p) x (T d)
};

inline JointGaussian stack(const ucgap::StateSpaceModel& m, Eigen::Index n) {
  const Eigen::Index p = m.p();
  const Eigen::Index d = m.d();
  JointGaussian g;
  g.state_mean = Vector::Zero(n * p);
  g.state_cov = Matrix::Zero(n * p, n * p);
  std::vector<Matrix> var(static_cast<std::size_t>(n));
  var[0] = m.kappa_init() * Matrix::Identity(p, p);
  for (Eigen::Index t = 1; t < n; ++t) {
    g.state_mean.segment(t * p, p) = m.d_state() + m.T_mat() * g.state_mean.segment((t - 1) * p, p);
    var[static_cast<std::size_t>(t)] =
        m.T_mat() * var[static_cast<std::size_t>(t - 1)] * m.T_mat().transpose() + m.Omega();
  }
  for (Eigen::Index s = 0; s < n; ++s) {
    Matrix power = Matrix::Identity(p, p);
    for (Eigen::Index t = s; t < n; ++t) {
      const Matrix c = power * var[static_cast<std::size_t>(s)];  // Cov(alpha_t, alpha_s)
      g.state_cov.block(t * p, s * p, p, p) = c;
      g.state_cov.block(s * p, t * p, p, p) = c.transpose();
      power = m.T_mat() * power;
    }
  }
  Matrix H = Matrix::Zero(n * d, n * p);
  Matrix R = Matrix::Zero(n * d, n * d);
  g.obs_mean.resize(n * d);
  for (Eigen::Index t = 0; t < n; ++t) {
    H.block(t * d, t * p, d, p) = m.Z();
    R.block(t * d, t * d, d, d) = m.Sigma();
    g.obs_mean.segment(t * d, d) = m.c();
  }
  g.obs_mean += H * g.state_mean;
  g.obs_cov = H * g.state_cov * H.transpose() + R;
  g.cross = g.state_cov * H.transpose();
  return g;
}

inline Vector flatten(const Matrix& rows_by_time) {
  Vector out(rows_by_time.size());
  for (Eigen::Index t = 0; t < rows_by_time.rows(); ++t)
    out.segment(t * rows_by_time.cols(), rows_by_time.cols()) = rows_by_time.row(t).transpose();
  return out;
}

inline double gaussian_log_density(const Vector& x, const Vector& mean, const Matrix& cov) {
  const Eigen::LDLT<Matrix> ldlt(cov);
  const Vector r = x - mean;
  const double quad = r.dot(ldlt.solve(r));
  const double logdet = ldlt.vectorD().array().log().sum();
  return -0.5 * (static_cast<double>(x.size()) * std::log(2.0 * M_PI) + logdet + quad);
}

/// E[alpha | y] as a T x p matrix.
inline Matrix conditional_state_mean(const JointGaussian& g, const Matrix& y, Eigen::Index p) {
  const Vector cond = g.state_mean + g.cross * g.obs_cov.ldlt().solve(flatten(y) - g.obs_mean);
  const Eigen::Index n = y.rows();
  Matrix out(n, p);
  for (Eigen::Index t = 0; t < n; ++t) out.row(t) = cond.segment(t * p, p).transpose();
  return out;
}

inline Matrix conditional_state_cov(const JointGaussian& g) {
  return g.state_cov - g.cross * g.obs_cov.ldlt().solve(g.cross.transpose());
}

/// Random stable model with well-conditioned covariances.
inline ucgap::StateSpaceModel random_model(std::mt19937_64& gen, int p, int d, double kappa) {
  std::normal_distribution<double> z;
  const auto rmat = [&](int r, int c) {
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = z(gen);
    return m;
  };
  Matrix T = rmat(p, p);
  const double radius = T.eigenvalues().cwiseAbs().maxCoeff();
  T *= 0.9 / std::max(radius, 1e-3);
  const Matrix A = rmat(p, p);
  const Matrix B = rmat(d, d);
  const Matrix Omega = 0.5 * A * A.transpose() + 0.1 * Matrix::Identity(p, p);
  const Matrix Sigma = 0.5 * B * B.transpose() + 0.1 * Matrix::Identity(d, d);
  return ucgap::StateSpaceModel(rmat(d, 1).col(0), rmat(p, 1).col(0), rmat(d, p), T, Sigma, Omega,
                                kappa);
}

/// Asymptotic Kolmogorov distribution tail P(K > x).
inline double kolmogorov_tail(double x) {
  if (x < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

/// One-sample KS p-value against a CDF.
template <class Cdf>
double ks_one_sample(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    dmax = std::max({dmax, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * dmax);
}

/// Two-sample KS p-value.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double dmax = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    dmax = std::max(dmax, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return kolmogorov_tail((ne + 0.12 + 0.11 / ne) * dmax);
}

/// Shortest interval [x_lo, x_hi] holding at least ceil(level n) sorted draws,
/// by enumerating every (lo, hi) pair. Ties keep the lowest lo.
inline std::pair<double, double> hpd_exhaustive(std::vector<double> x, double level) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  std::size_t k = 0;
  while (static_cast<double>(k) < level * static_cast<double>(n) - 1e-9) ++k;
  std::pair<double, double> best{0.0, 0.0};
  double best_w = INFINITY;
  for (std::size_t lo = 0; lo < n; ++lo) {
    for (std::size_t hi = lo; hi < n; ++hi) {
      if (hi - lo + 1 < k) continue;
      const double w = x[hi] - x[lo];
      if (w < best_w) {
        best_w = w;
        best = {x[lo], x[hi]};
      }
    }
  }
  return best;
}

/// Dense HP trend: (I + lambda D'D)^{-1} y with D built explicitly.
inline Vector hp_dense(const Vector& y, double lambda) {
  const Eigen::Index n = y.size();
  Matrix D = Matrix::Zero(n - 2, n);
  for (Eigen::Index i = 0; i < n - 2; ++i) {
    D(i, i) = 1.0;
    D(i, i + 1) = -2.0;
    D(i, i + 2) = 1.0;
  }
  const Matrix A = Matrix::Identity(n, n) + lambda * D.transpose() * D;
  return A.ldlt().solve(y);
}

}  // namespace oracle
