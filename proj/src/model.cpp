#include "coxgp/model.hpp"

#include <cmath>

#include "coxgp/error.hpp"

namespace coxgp {

void HyperParams::validate() const {
  for (double v : {a_rho, b_rho, a_theta, b_theta, a_gamma, b_gamma}) {
    require(v > 0.0 && std::isfinite(v), "hyperparameters must be positive and finite");
  }
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log_sigmoid(double t) {
  if (t >= 0.0) return -std::log1p(std::exp(-t));
  return t - std::log1p(std::exp(t));
}

double lengthscale_from(double gamma, double theta, std::size_t d) {
  require(gamma > 0.0, "lengthscale_from: gamma must be positive");
  require(d >= 1, "lengthscale_from: d must be >= 1");
  return std::pow(gamma, theta / static_cast<double>(d));
}

ArdKernel::ArdKernel(std::span<const double> nodes, std::size_t dim) : dim_(dim) {
  require(dim >= 1 && nodes.size() % dim == 0 && !nodes.empty(), "ard kernel: bad node array");
  size_ = nodes.size() / dim;
  const auto n = static_cast<Eigen::Index>(size_);
  sqdiff_.assign(dim, Eigen::MatrixXd(n, n));
  for (std::size_t j = 0; j < dim; ++j) {
    auto& m = sqdiff_[j];
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        const double diff = nodes[a * dim + j] - nodes[b * dim + j];
        m(a, b) = diff * diff;
      }
    }
  }
}

ArdKernel::ArdKernel(const InterpolationBasis& basis) : ArdKernel(basis.nodes(), basis.dim()) {}

Eigen::MatrixXd ArdKernel::covariance(std::span<const double> ell) const {
  require(ell.size() == dim_, "ard kernel: ell has wrong dimension");
  for (double l : ell) require(l >= 0.0 && std::isfinite(l), "ard kernel: ell must be finite and >= 0");
  Eigen::MatrixXd expo = ell[0] * sqdiff_[0];
  for (std::size_t j = 1; j < dim_; ++j) expo.noalias() += ell[j] * sqdiff_[j];
  Eigen::MatrixXd c = (-expo.array()).exp().matrix();
  c.diagonal().setOnes();
  return c;
}

bool ArdKernel::try_factorize(std::span<const double> ell, CholeskyFactor& out) const {
  return try_jittered_cholesky(covariance(ell), out, schedule_);
}

CholeskyFactor ArdKernel::factorize(std::span<const double> ell) const {
  return jittered_cholesky(covariance(ell), schedule_);
}

ArdCovariance ard_covariance(std::span<const double> nodes, std::size_t dim, std::span<const double> ell) {
  ArdKernel kernel(nodes, dim);
  ArdCovariance out;
  out.matrix = kernel.covariance(ell);
  out.factor = jittered_cholesky(out.matrix);
  return out;
}

LatentState::LatentState(double rho_star_, std::vector<double> theta_, std::vector<double> ell, Eigen::VectorXd w_,
                         const ArdKernel& kernel)
    : LatentState(rho_star_, std::move(theta_), ell, std::move(w_), kernel.factorize(ell)) {}

LatentState::LatentState(double rho_star_, std::vector<double> theta_, std::vector<double> ell, Eigen::VectorXd w_,
                         CholeskyFactor factor)
    : rho_star(rho_star_), theta(std::move(theta_)), w(std::move(w_)), ell_(std::move(ell)), factor_(std::move(factor)) {
  require(rho_star > 0.0, "latent state: rho_star must be positive");
  require(theta.size() == ell_.size(), "latent state: theta/ell dimension mismatch");
  require(w.size() == factor_.size(), "latent state: w length does not match the covariance");
}

void LatentState::set_ell(std::vector<double> ell, const ArdKernel& kernel) {
  CholeskyFactor f = kernel.factorize(ell);
  set_ell(std::move(ell), std::move(f));
}

void LatentState::set_ell(std::vector<double> ell, CholeskyFactor factor) {
  require(ell.size() == ell_.size(), "latent state: ell has wrong dimension");
  require(factor.size() == w.size(), "latent state: factor size mismatch");
  ell_ = std::move(ell);
  factor_ = std::move(factor);
}

Eigen::VectorXd draw_prior_w(const CholeskyFactor& factor, Rng& rng) {
  Eigen::VectorXd z(factor.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return factor.lower.triangularView<Eigen::Lower>() * z;
}

LatentState sample_prior(const HyperParams& hyper, const ArdKernel& kernel, Rng& rng) {
  hyper.validate();
  const std::size_t d = kernel.dim();
  const double rho_star = rng.gamma(hyper.a_rho, hyper.b_rho);
  std::vector<double> theta(d), ell(d);
  for (std::size_t j = 0; j < d; ++j) {
    theta[j] = rng.beta(hyper.a_theta, hyper.b_theta);
    const double gamma = rng.gamma(hyper.a_gamma, hyper.b_gamma);
    ell[j] = lengthscale_from(gamma, theta[j], d);
  }
  CholeskyFactor factor = kernel.factorize(ell);
  Eigen::VectorXd w = draw_prior_w(factor, rng);
  return LatentState(rho_star, std::move(theta), std::move(ell), std::move(w), std::move(factor));
}

LatentState sample_prior(const HyperParams& hyper, const InterpolationBasis& basis, std::uint64_t seed) {
  ArdKernel kernel(basis);
  Rng rng(seed);
  return sample_prior(hyper, kernel, rng);
}

LatentState deterministic_start(const HyperParams& hyper, const ArdKernel& kernel) {
  hyper.validate();
  const std::size_t d = kernel.dim();
  return LatentState(hyper.a_rho / hyper.b_rho, std::vector<double>(d, 0.5), std::vector<double>(d, 1.0),
                     Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kernel.size())), kernel);
}

double intensity_at(const LatentState& state, const InterpolationBasis& basis, std::span<const double> z) {
  return state.rho_star * sigmoid(basis.evaluate({state.w.data(), static_cast<std::size_t>(state.w.size())}, z));
}

double log_prior_w(const Eigen::VectorXd& w, const CholeskyFactor& factor) {
  require(w.size() == factor.size(), "log_prior_w: size mismatch");
  return -0.5 * inverse_quadratic_form(factor, w) - 0.5 * factor.log_det;
}

double log_prior_w(const LatentState& state) { return log_prior_w(state.w, state.factor()); }

}  // namespace coxgp
