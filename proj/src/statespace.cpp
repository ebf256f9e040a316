#include "ucgap/statespace.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ucgap/errors.hpp"

namespace ucgap {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void symmetrize(Matrix& A) { A = 0.5 * (A + A.transpose()).eval(); }

bool is_symmetric(const Matrix& A) {
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  return (A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale;
}

bool is_psd(const Matrix& A) {
  if (A.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  return es.eigenvalues().minCoeff() >= -1e-10 * scale;
}

// Inverse (or pseudo-inverse on the support) of a covariance, with the data
// needed for its Gaussian log density.
struct CovarianceFactor {
  Matrix inverse;
  Matrix null_basis;  // columns spanning the null space (empty if full rank)
  double log_det = 0.0;
  Eigen::Index rank = 0;
};

CovarianceFactor factor_covariance(const Matrix& F) {
  CovarianceFactor out;
  const Eigen::Index n = F.rows();
  Eigen::LLT<Matrix> llt(F);
  if (llt.info() == Eigen::Success) {
    const auto diag = llt.matrixL().toDenseMatrix().diagonal();
    const double max_pivot = diag.maxCoeff();
    if (diag.minCoeff() > 1e-6 * std::max(1.0, max_pivot)) {
      out.inverse = llt.solve(Matrix::Identity(n, n));
      out.log_det = 2.0 * diag.array().log().sum();
      out.rank = n;
      return out;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(F);
  const Vector& ev = es.eigenvalues();
  const Matrix& U = es.eigenvectors();
  // Eigenvalues below the rounding level of F itself are treated as zero.
  const double tol = 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, ev.cwiseAbs().maxCoeff());
  out.inverse = Matrix::Zero(n, n);
  std::vector<Eigen::Index> null_cols;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ev(i) > tol) {
      out.inverse.noalias() += (U.col(i) / ev(i)) * U.col(i).transpose();
      out.log_det += std::log(ev(i));
      ++out.rank;
    } else {
      null_cols.push_back(i);
    }
  }
  out.null_basis.resize(n, static_cast<Eigen::Index>(null_cols.size()));
  for (std::size_t j = 0; j < null_cols.size(); ++j) out.null_basis.col(j) = U.col(null_cols[j]);
  return out;
}

void check_null_innovation(const CovarianceFactor& f, const Vector& v, double scale,
                           Eigen::Index t) {
  if (f.rank == v.size()) return;
  const Vector proj = f.null_basis.transpose() * v;
  if (proj.cwiseAbs().maxCoeff() > 1e-6 * std::max(1.0, scale)) {
    throw NumericalError("kalman_filter: innovation covariance F_t is singular at t=" +
                         std::to_string(t + 1) + " (1-based) with a non-degenerate innovation");
  }
}

double degenerate_gaussian_log_density(const CovarianceFactor& f, const Vector& x) {
  return -0.5 * (static_cast<double>(f.rank) * kLog2Pi + f.log_det + x.dot(f.inverse * x));
}

}  // namespace

StateSpaceModel::StateSpaceModel(Vector c, Vector d_state, Matrix Z, Matrix T_mat, Matrix Sigma,
                                 Matrix Omega, double kappa_init)
    : c_(std::move(c)),
      d_state_(std::move(d_state)),
      Z_(std::move(Z)),
      T_(std::move(T_mat)),
      Sigma_(std::move(Sigma)),
      Omega_(std::move(Omega)),
      kappa_(kappa_init) {
  const Eigen::Index p = T_.rows();
  const Eigen::Index d = Z_.rows();
  if (p == 0 || d == 0) throw StructuralError("StateSpaceModel: empty state or observation");
  if (T_.cols() != p) throw StructuralError("StateSpaceModel: T must be square");
  if (Z_.cols() != p) throw StructuralError("StateSpaceModel: Z must be d x p");
  if (c_.size() != d) throw StructuralError("StateSpaceModel: c must have length d");
  if (d_state_.size() != p) throw StructuralError("StateSpaceModel: d must have length p");
  if (Sigma_.rows() != d || Sigma_.cols() != d)
    throw StructuralError("StateSpaceModel: Sigma must be d x d");
  if (Omega_.rows() != p || Omega_.cols() != p)
    throw StructuralError("StateSpaceModel: Omega must be p x p");
  if (!(kappa_ > 0.0) || !std::isfinite(kappa_))
    throw StructuralError("StateSpaceModel: kappa_init must be positive and finite");
  if (!c_.allFinite() || !d_state_.allFinite() || !Z_.allFinite() || !T_.allFinite() ||
      !Sigma_.allFinite() || !Omega_.allFinite())
    throw StructuralError("StateSpaceModel: non-finite system matrix entry");
  if (!is_symmetric(Sigma_) || !is_psd(Sigma_))
    throw StructuralError("StateSpaceModel: Sigma must be symmetric PSD");
  if (!is_symmetric(Omega_) || !is_psd(Omega_))
    throw StructuralError("StateSpaceModel: Omega must be symmetric PSD");
}

StateSpaceModel StateSpaceModel::with_kappa(double kappa) const {
  return StateSpaceModel(c_, d_state_, Z_, T_, Sigma_, Omega_, kappa);
}

FilterOutput kalman_filter(const StateSpaceModel& model, const ObservationMatrix& y) {
  const Eigen::Index p = model.p();
  const Eigen::Index d = model.d();
  const Eigen::Index n = y.rows();
  if (n < 1) throw StructuralError("kalman_filter: need at least one observation");
  if (y.cols() != d)
    throw StructuralError("kalman_filter: observation width " + std::to_string(y.cols()) +
                          " does not match model dimension " + std::to_string(d));
  if (!y.allFinite()) throw StructuralError("kalman_filter: observations must be finite");

  const Matrix& Z = model.Z();
  const Matrix& T = model.T_mat();

  FilterOutput out;
  out.predicted_mean.resize(n, p);
  out.filtered_mean.resize(n, p);
  out.innovations.resize(n, d);
  out.predicted_cov.reserve(n);
  out.filtered_cov.reserve(n);
  out.innovation_cov.reserve(n);
  out.innovation_cov_inv.reserve(n);

  Vector a = Vector::Zero(p);
  Matrix P = model.kappa_init() * Matrix::Identity(p, p);
  double loglik = 0.0;

  for (Eigen::Index t = 0; t < n; ++t) {
    out.predicted_mean.row(t) = a.transpose();
    out.predicted_cov.push_back(P);

    const Vector v = y.row(t).transpose() - model.c() - Z * a;
    const Matrix PZt = P * Z.transpose();
    Matrix F = Z * PZt + model.Sigma();
    symmetrize(F);
    const CovarianceFactor fac = factor_covariance(F);
    check_null_innovation(fac, v, y.row(t).cwiseAbs().maxCoeff(), t);
    if (fac.rank > 0) loglik += degenerate_gaussian_log_density(fac, v);

    const Matrix gain = PZt * fac.inverse;  // P Z' F^{-1}
    const Vector a_filt = a + gain * v;
    Matrix P_filt = P - gain * PZt.transpose();
    symmetrize(P_filt);

    out.innovations.row(t) = v.transpose();
    out.innovation_cov.push_back(F);
    out.innovation_cov_inv.push_back(fac.inverse);
    out.filtered_mean.row(t) = a_filt.transpose();
    out.filtered_cov.push_back(P_filt);

    a = model.d_state() + T * a_filt;
    P = T * P_filt * T.transpose() + model.Omega();
    symmetrize(P);
  }
  if (!std::isfinite(loglik)) throw NumericalError("kalman_filter: non-finite log-likelihood");
  out.log_likelihood = loglik;
  out.diffuse_log_likelihood =
      loglik + 0.5 * static_cast<double>(p) * std::log(model.kappa_init());
  return out;
}

SmootherOutput kalman_smoother(const StateSpaceModel& model, const FilterOutput& filt) {
  const Eigen::Index p = model.p();
  const Eigen::Index n = filt.predicted_mean.rows();
  if (filt.predicted_mean.cols() != p || static_cast<Eigen::Index>(filt.predicted_cov.size()) != n)
    throw StructuralError("kalman_smoother: filter output does not match the model");
  const Matrix& Z = model.Z();
  const Matrix& T = model.T_mat();

  SmootherOutput out;
  out.mean.resize(n, p);
  out.cov.resize(n);

  Vector r = Vector::Zero(p);
  Matrix N = Matrix::Zero(p, p);
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const Matrix& P = filt.predicted_cov[t];
    const Matrix& Finv = filt.innovation_cov_inv[t];
    const Matrix K = T * P * Z.transpose() * Finv;
    const Matrix L = T - K * Z;
    const Matrix ZtFinv = Z.transpose() * Finv;
    r = ZtFinv * filt.innovations.row(t).transpose() + L.transpose() * r;
    N = ZtFinv * Z + L.transpose() * N * L;
    symmetrize(N);
    out.mean.row(t) = (filt.predicted_mean.row(t).transpose() + P * r).transpose();
    Matrix V = P - P * N * P;
    symmetrize(V);
    out.cov[t] = std::move(V);
  }
  return out;
}

Matrix psd_root(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  const Vector ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

SimulationSmoother::SimulationSmoother(const StateSpaceModel& model, Eigen::Index n_obs)
    : model_(model), n_(n_obs) {
  if (n_obs < 1) throw StructuralError("SimulationSmoother: need at least one observation");
  const Eigen::Index p = model_.p();
  const Matrix& Z = model_.Z();
  const Matrix& T = model_.T_mat();
  P_.reserve(n_);
  Finv_.reserve(n_);
  K_.reserve(n_);
  Matrix P = model_.kappa_init() * Matrix::Identity(p, p);
  for (Eigen::Index t = 0; t < n_; ++t) {
    P_.push_back(P);
    const Matrix PZt = P * Z.transpose();
    Matrix F = Z * PZt + model_.Sigma();
    symmetrize(F);
    const CovarianceFactor fac = factor_covariance(F);
    const Matrix gain = PZt * fac.inverse;
    Matrix P_filt = P - gain * PZt.transpose();
    symmetrize(P_filt);
    K_.push_back(T * gain);
    Finv_.push_back(fac.inverse);
    P = T * P_filt * T.transpose() + model_.Omega();
    symmetrize(P);
  }
  omega_root_ = psd_root(model_.Omega());
  sigma_root_ = psd_root(model_.Sigma());
}

LatentStatePath SimulationSmoother::draw(const ObservationMatrix& y, RandomStream& rng) const {
  const Eigen::Index p = model_.p();
  const Eigen::Index d = model_.d();
  if (y.rows() != n_ || y.cols() != d)
    throw StructuralError("SimulationSmoother: observation matrix has the wrong shape");
  const Matrix& Z = model_.Z();
  const Matrix& T = model_.T_mat();

  // Unconditional draw (alpha+, y+).
  LatentStatePath alpha_plus(n_, p);
  Matrix y_star(n_, d);
  Vector state(p);
  Vector z_state(p);
  Vector z_obs(d);
  const double init_sd = std::sqrt(model_.kappa_init());
  for (Eigen::Index i = 0; i < p; ++i) state(i) = init_sd * rng.normal();
  for (Eigen::Index t = 0; t < n_; ++t) {
    alpha_plus.row(t) = state.transpose();
    for (Eigen::Index i = 0; i < d; ++i) z_obs(i) = rng.normal();
    const Vector y_plus = model_.c() + Z * state + sigma_root_ * z_obs;
    y_star.row(t) = y.row(t) - y_plus.transpose();
    for (Eigen::Index i = 0; i < p; ++i) z_state(i) = rng.normal();
    state = model_.d_state() + T * state + omega_root_ * z_state;
  }

  // Smoothed mean of y - y+ under the intercept-free model.
  Matrix a_pred(n_, p);
  Matrix innov(n_, d);
  Vector a = Vector::Zero(p);
  for (Eigen::Index t = 0; t < n_; ++t) {
    a_pred.row(t) = a.transpose();
    const Vector v = y_star.row(t).transpose() - Z * a;
    innov.row(t) = v.transpose();
    a = T * a + K_[t] * v;
  }
  Vector r = Vector::Zero(p);
  LatentStatePath out(n_, p);
  for (Eigen::Index t = n_ - 1; t >= 0; --t) {
    const Vector u = Finv_[t] * innov.row(t).transpose() - K_[t].transpose() * r;
    r = Z.transpose() * u + T.transpose() * r;
    out.row(t) = alpha_plus.row(t) + a_pred.row(t) + (P_[t] * r).transpose();
  }
  return out;
}

LatentStatePath simulation_smoother(const StateSpaceModel& model, const ObservationMatrix& y,
                                    RandomStream& rng) {
  if (y.cols() != model.d())
    throw StructuralError("simulation_smoother: observation width does not match the model");
  if (!y.allFinite()) throw StructuralError("simulation_smoother: observations must be finite");
  return SimulationSmoother(model, y.rows()).draw(y, rng);
}

SimulatedPath simulate_state_space(const StateSpaceModel& model, Eigen::Index n_obs,
                                   double init_scale, RandomStream& rng) {
  if (n_obs < 1) throw StructuralError("simulate_state_space: need at least one observation");
  if (!(init_scale >= 0.0)) throw DomainError("simulate_state_space: init_scale must be >= 0");
  const Eigen::Index p = model.p();
  const Eigen::Index d = model.d();
  const Matrix omega_root = psd_root(model.Omega());
  const Matrix sigma_root = psd_root(model.Sigma());
  SimulatedPath out{LatentStatePath(n_obs, p), ObservationMatrix(n_obs, d)};
  Vector state(p);
  Vector z_state(p);
  Vector z_obs(d);
  const double init_sd = std::sqrt(init_scale);
  for (Eigen::Index i = 0; i < p; ++i) state(i) = init_sd * rng.normal();
  for (Eigen::Index t = 0; t < n_obs; ++t) {
    out.states.row(t) = state.transpose();
    for (Eigen::Index i = 0; i < d; ++i) z_obs(i) = rng.normal();
    out.observations.row(t) = (model.c() + model.Z() * state + sigma_root * z_obs).transpose();
    for (Eigen::Index i = 0; i < p; ++i) z_state(i) = rng.normal();
    state = model.d_state() + model.T_mat() * state + omega_root * z_state;
  }
  return out;
}

double complete_data_log_density(const StateSpaceModel& model, const ObservationMatrix& y,
                                 const LatentStatePath& states) {
  const Eigen::Index p = model.p();
  const Eigen::Index n = y.rows();
  if (y.cols() != model.d() || states.rows() != n || states.cols() != p)
    throw StructuralError("complete_data_log_density: dimension mismatch");
  const CovarianceFactor sigma = factor_covariance(model.Sigma());
  const CovarianceFactor omega = factor_covariance(model.Omega());
  const double kappa = model.kappa_init();

  const Vector a1 = states.row(0).transpose();
  double total = -0.5 * (a1.squaredNorm() / kappa + static_cast<double>(p) * (kLog2Pi + std::log(kappa)));
  for (Eigen::Index t = 0; t < n; ++t) {
    const Vector alpha = states.row(t).transpose();
    const Vector e = y.row(t).transpose() - model.c() - model.Z() * alpha;
    total += degenerate_gaussian_log_density(sigma, e);
    if (t + 1 < n) {
      const Vector eta = states.row(t + 1).transpose() - model.d_state() - model.T_mat() * alpha;
      total += degenerate_gaussian_log_density(omega, eta);
    }
  }
  return total;
}

}  // namespace ucgap
