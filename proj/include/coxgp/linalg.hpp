#pragma once

#include <Eigen/Dense>

namespace coxgp {

/// Lower Cholesky factor of (A + jitter * I), with the jitter that was
/// actually needed and the log-determinant of the jittered matrix.
struct CholeskyFactor {
  Eigen::MatrixXd lower;
  double jitter = 0.0;
  double log_det = 0.0;

  Eigen::Index size() const { return lower.rows(); }
};

/// Jitter escalation shared by the field simulator and the GP prior:
/// relative jitter starts at 1e-10 of the largest diagonal entry and is
/// multiplied by 10 up to 1e-4.
struct JitterSchedule {
  double first = 1e-10;
  double last = 1e-4;
  double factor = 10.0;
};

/// Throws FactorizationError when every jitter level fails.
CholeskyFactor jittered_cholesky(const Eigen::MatrixXd& a, const JitterSchedule& schedule = {});

/// Returns false instead of throwing.
bool try_jittered_cholesky(const Eigen::MatrixXd& a, CholeskyFactor& out,
                           const JitterSchedule& schedule = {});

/// x^T (L L^T)^{-1} x.
double inverse_quadratic_form(const CholeskyFactor& factor, const Eigen::VectorXd& x);

}  // namespace coxgp
