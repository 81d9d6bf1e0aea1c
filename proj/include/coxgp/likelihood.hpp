#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "coxgp/cox_sim.hpp"
#include "coxgp/geometry.hpp"
#include "coxgp/model.hpp"

namespace coxgp {

class ThreadPool;

/// Dataset-dependent precomputation for the quadrature likelihood: covariate
/// values at every quadrature node and every event, and their interpolation
/// stencils in the basis.
class LikelihoodContext {
 public:
  LikelihoodContext(const Dataset& dataset, const QuadratureRule& quadrature, const InterpolationBasis& basis);

  /// Quantities of a w vector that the likelihood and the rho* update share.
  struct WTerms {
    double sigma_integral = 0.0;   // sum_i int_W sigma(w(Z_i(x))) dx
    double event_log_sigma = 0.0;  // sum_i sum_k log sigma(w(Z_i(X_k)))
  };

  std::size_t replicates() const { return replicates_; }
  std::size_t total_events() const { return total_events_; }
  std::size_t events(std::size_t i) const { return event_offset_[i + 1] - event_offset_[i]; }
  double volume() const { return volume_; }
  std::size_t basis_size() const { return basis_size_; }
  std::size_t covariate_dim() const { return dim_; }
  const QuadratureRule& quadrature() const { return quadrature_; }

  std::span<const double> node_covariates(std::size_t i) const;
  std::span<const double> event_covariates(std::size_t i) const;

  WTerms evaluate(const Eigen::VectorXd& w, ThreadPool* pool = nullptr) const;

  /// sum_k log(rho* sigma) - (rho* * sigma_integral - n * volume).
  double log_likelihood(const WTerms& terms, double rho_star) const;

 private:
  void replicate_terms(std::size_t i, const double* w, double& sigma_integral, double& event_log_sigma) const;

  QuadratureRule quadrature_;
  std::size_t replicates_ = 0;
  std::size_t dim_ = 0;
  std::size_t stride_ = 0;
  std::size_t basis_size_ = 0;
  std::size_t total_events_ = 0;
  double volume_ = 0.0;
  std::vector<double> node_cov_;   // replicate-major, q-major, d per node
  std::vector<double> event_cov_;  // concatenated events, d per event
  std::vector<std::size_t> event_offset_;
  std::vector<std::uint32_t> node_index_;
  std::vector<double> node_weight_;
  std::vector<std::uint32_t> event_index_;
  std::vector<double> event_weight_;
};

double log_likelihood(const LikelihoodContext& ctx, const LatentState& state, ThreadPool* pool = nullptr);
double integral_of_sigma(const LikelihoodContext& ctx, const LatentState& state, ThreadPool* pool = nullptr);

}  // namespace coxgp
