#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ucgap/random.hpp"

namespace ucgap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Observations stacked by time: row t holds y_t (T x d).
using ObservationMatrix = Matrix;
/// Latent states stacked by time: row t holds alpha_t (T x p).
using LatentStatePath = Matrix;

inline constexpr double kDefaultDiffuseScale = 1e7;

/// Linear Gaussian state-space model
///
///   y_t         = c + Z alpha_t + eps_t,      eps_t ~ N(0, Sigma)
///   alpha_{t+1} = d + T alpha_t + eta_t,      eta_t ~ N(0, Omega)
///   alpha_1     ~ N(0, kappa I)
///
/// Omega may be singular (deterministic companion rows). Immutable once built;
/// the constructor enforces dimensional consistency, symmetry and PSD-ness.
class StateSpaceModel {
 public:
  StateSpaceModel(Vector c, Vector d_state, Matrix Z, Matrix T_mat, Matrix Sigma,
                  Matrix Omega, double kappa_init = kDefaultDiffuseScale);

  const Vector& c() const { return c_; }
  const Vector& d_state() const { return d_state_; }
  const Matrix& Z() const { return Z_; }
  const Matrix& T_mat() const { return T_; }
  const Matrix& Sigma() const { return Sigma_; }
  const Matrix& Omega() const { return Omega_; }
  double kappa_init() const { return kappa_; }

  Eigen::Index p() const { return T_.rows(); }
  Eigen::Index d() const { return Z_.rows(); }

  /// Copy with a different diffuse scale.
  StateSpaceModel with_kappa(double kappa) const;

 private:
  Vector c_;
  Vector d_state_;
  Matrix Z_;
  Matrix T_;
  Matrix Sigma_;
  Matrix Omega_;
  double kappa_;
};

struct FilterOutput {
  Matrix predicted_mean;                  // a_{t|t-1}, T x p
  std::vector<Matrix> predicted_cov;      // P_{t|t-1}
  Matrix filtered_mean;                   // a_{t|t}, T x p
  std::vector<Matrix> filtered_cov;       // P_{t|t}
  Matrix innovations;                     // v_t, T x d
  std::vector<Matrix> innovation_cov;     // F_t
  std::vector<Matrix> innovation_cov_inv; // F_t^{-1} (pseudo-inverse when F_t is degenerate)
  double log_likelihood = 0.0;
  /// log_likelihood + (p/2) log(kappa): the kappa-free part of the
  /// large-kappa likelihood, which converges as kappa grows.
  double diffuse_log_likelihood = 0.0;
};

struct SmootherOutput {
  Matrix mean;               // E[alpha_t | y_{1:T}], T x p
  std::vector<Matrix> cov;   // Var[alpha_t | y_{1:T}]
};

/// Kalman filter with prediction-error log-likelihood.
///
/// A singular F_t is accepted only when the innovation has no component in its
/// null space (a perfectly predicted observation); that direction then carries
/// no information. Any other singular F_t raises NumericalError naming t.
FilterOutput kalman_filter(const StateSpaceModel& model, const ObservationMatrix& y);

/// Fixed-interval smoother (backward r_t / N_t recursions).
SmootherOutput kalman_smoother(const StateSpaceModel& model, const FilterOutput& filt);

/// Draws one path from p(alpha | y) with the mean-correction simulation smoother:
/// simulate (alpha+, y+) from the model, smooth y - y+ and add back alpha+.
LatentStatePath simulation_smoother(const StateSpaceModel& model, const ObservationMatrix& y,
                                    RandomStream& rng);

/// Precomputed, data-independent filter quantities for repeated draws from the
/// same model and sample length.
class SimulationSmoother {
 public:
  SimulationSmoother(const StateSpaceModel& model, Eigen::Index n_obs);

  LatentStatePath draw(const ObservationMatrix& y, RandomStream& rng) const;

 private:
  StateSpaceModel model_;
  Eigen::Index n_;
  std::vector<Matrix> P_;     // predicted covariances
  std::vector<Matrix> Finv_;  // (pseudo) inverse innovation covariances
  std::vector<Matrix> K_;     // gains T P Z' F^{-1}
  Matrix omega_root_;
  Matrix sigma_root_;
};

/// Draws (states, observations) from the model, starting from
/// alpha_1 ~ N(0, init_scale I) (init_scale may be 0).
struct SimulatedPath {
  LatentStatePath states;
  ObservationMatrix observations;
};
SimulatedPath simulate_state_space(const StateSpaceModel& model, Eigen::Index n_obs,
                                   double init_scale, RandomStream& rng);

/// log p(y, alpha) under the model: initial-state density, transition and
/// measurement densities. Singular Sigma/Omega are handled as degenerate
/// Gaussians on their support.
double complete_data_log_density(const StateSpaceModel& model, const ObservationMatrix& y,
                                 const LatentStatePath& states);

/// Symmetric PSD square root L with L L' = A (eigendecomposition; negative
/// rounding-level eigenvalues clamped to zero).
Matrix psd_root(const Matrix& A);

}  // namespace ucgap
