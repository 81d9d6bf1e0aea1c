#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "coxgp/geometry.hpp"
#include "coxgp/linalg.hpp"
#include "coxgp/rng.hpp"

namespace coxgp {

/// Hyper-parameters of the hierarchical prior. Gamma laws use the rate
/// parametrization: rho* ~ Gamma(a_rho, b_rho) has mean a_rho / b_rho.
struct HyperParams {
  double a_rho = 1.0;
  double b_rho = 2.0;
  double a_theta = 2.0;
  double b_theta = 2.0;
  double a_gamma = 1.0;
  double b_gamma = 1.0;

  void validate() const;
};

double sigmoid(double t);
double log_sigmoid(double t);

/// gamma^(theta / d): the stochastic-power construction of a length-scale.
double lengthscale_from(double gamma, double theta, std::size_t d);

/// ARD square-exponential kernel on a fixed node set,
/// C(v, v') = exp(-sum_j ell_j (z_vj - z_v'j)^2).
/// Squared coordinate differences are kept so C can be rebuilt cheaply.
class ArdKernel {
 public:
  ArdKernel(std::span<const double> nodes, std::size_t dim);
  explicit ArdKernel(const InterpolationBasis& basis);

  std::size_t size() const { return size_; }
  std::size_t dim() const { return dim_; }
  const JitterSchedule& jitter_schedule() const { return schedule_; }
  void set_jitter_schedule(const JitterSchedule& s) { schedule_ = s; }

  Eigen::MatrixXd covariance(std::span<const double> ell) const;
  CholeskyFactor factorize(std::span<const double> ell) const;
  bool try_factorize(std::span<const double> ell, CholeskyFactor& out) const;

 private:
  std::size_t size_;
  std::size_t dim_;
  std::vector<Eigen::MatrixXd> sqdiff_;
  JitterSchedule schedule_{};
};

struct ArdCovariance {
  Eigen::MatrixXd matrix;
  CholeskyFactor factor;
};

ArdCovariance ard_covariance(std::span<const double> nodes, std::size_t dim, std::span<const double> ell);

/// Full parameter vector mutated by the sampler. The Cholesky factor of
/// C_ell is cached and replaced whenever ell changes.
class LatentState {
 public:
  LatentState(double rho_star, std::vector<double> theta, std::vector<double> ell, Eigen::VectorXd w,
              const ArdKernel& kernel);
  LatentState(double rho_star, std::vector<double> theta, std::vector<double> ell, Eigen::VectorXd w,
              CholeskyFactor factor);

  double rho_star;
  std::vector<double> theta;
  Eigen::VectorXd w;

  std::size_t dim() const { return ell_.size(); }
  const std::vector<double>& ell() const { return ell_; }
  const CholeskyFactor& factor() const { return factor_; }

  void set_ell(std::vector<double> ell, const ArdKernel& kernel);
  /// The factor must belong to C_ell for the given ell.
  void set_ell(std::vector<double> ell, CholeskyFactor factor);

 private:
  std::vector<double> ell_;
  CholeskyFactor factor_;
};

LatentState sample_prior(const HyperParams& hyper, const ArdKernel& kernel, Rng& rng);
LatentState sample_prior(const HyperParams& hyper, const InterpolationBasis& basis, std::uint64_t seed);

/// w = 0, theta = 1/2, ell = 1, rho* = a_rho / b_rho.
LatentState deterministic_start(const HyperParams& hyper, const ArdKernel& kernel);

/// Draw from N(0, C) through the cached factor.
Eigen::VectorXd draw_prior_w(const CholeskyFactor& factor, Rng& rng);

double intensity_at(const LatentState& state, const InterpolationBasis& basis, std::span<const double> z);

/// -1/2 w^T C^{-1} w - 1/2 log det C (constants free of ell dropped).
double log_prior_w(const Eigen::VectorXd& w, const CholeskyFactor& factor);
double log_prior_w(const LatentState& state);

}  // namespace coxgp
