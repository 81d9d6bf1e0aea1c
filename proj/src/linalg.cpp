#include "coxgp/linalg.hpp"

#include <cmath>

#include "coxgp/error.hpp"

namespace coxgp {

bool try_jittered_cholesky(const Eigen::MatrixXd& a, CholeskyFactor& out,
                           const JitterSchedule& schedule) {
  if (a.rows() != a.cols() || a.rows() == 0) throw Error("cholesky: matrix must be square and non-empty");
  const double scale = a.diagonal().cwiseAbs().maxCoeff();
  const double base = scale > 0.0 ? scale : 1.0;
  Eigen::MatrixXd work;
  for (double rel = schedule.first; rel <= schedule.last * (1.0 + 1e-9); rel *= schedule.factor) {
    const double jitter = rel * base;
    work = a;
    work.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(work);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd lower = llt.matrixL();
    const auto diag = lower.diagonal();
    if (!(diag.array() > 0.0).all() || !diag.allFinite()) continue;
    out.lower = std::move(lower);
    out.jitter = jitter;
    out.log_det = 2.0 * out.lower.diagonal().array().log().sum();
    return true;
  }
  return false;
}

CholeskyFactor jittered_cholesky(const Eigen::MatrixXd& a, const JitterSchedule& schedule) {
  CholeskyFactor f;
  if (!try_jittered_cholesky(a, f, schedule)) {
    throw FactorizationError("cholesky failed at maximum jitter (matrix of size " +
                             std::to_string(a.rows()) + ")");
  }
  return f;
}

double inverse_quadratic_form(const CholeskyFactor& factor, const Eigen::VectorXd& x) {
  const Eigen::VectorXd y = factor.lower.triangularView<Eigen::Lower>().solve(x);
  return y.squaredNorm();
}

}  // namespace coxgp
