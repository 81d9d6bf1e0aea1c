#include "coxgp/likelihood.hpp"

#include <cmath>

#include "coxgp/error.hpp"
#include "coxgp/parallel.hpp"

namespace coxgp {

LikelihoodContext::LikelihoodContext(const Dataset& dataset, const QuadratureRule& quadrature,
                                     const InterpolationBasis& basis)
    : quadrature_(quadrature) {
  require(!dataset.empty(), "likelihood: empty dataset");
  require(dataset.window() == quadrature.window, "likelihood: quadrature and dataset windows differ");
  require(dataset.covariate_dim() == basis.dim(), "likelihood: basis and covariate dimensions differ");
  replicates_ = dataset.size();
  dim_ = basis.dim();
  stride_ = basis.stencil_size();
  basis_size_ = basis.size();
  volume_ = quadrature.window.volume();
  const std::size_t Q = quadrature.size();

  node_cov_.resize(replicates_ * Q * dim_);
  node_index_.resize(replicates_ * Q * stride_);
  node_weight_.resize(replicates_ * Q * stride_);
  event_offset_.assign(1, 0);
  for (std::size_t i = 0; i < replicates_; ++i) {
    const auto& rep = dataset[i];
    for (std::size_t q = 0; q < Q; ++q) {
      const std::size_t row = i * Q + q;
      std::span<double> z(node_cov_.data() + row * dim_, dim_);
      rep.field.evaluate(quadrature.node(q), z);
      const Stencil s = basis.stencil(z);
      for (std::size_t k = 0; k < stride_; ++k) {
        node_index_[row * stride_ + k] = s.index[k];
        node_weight_[row * stride_ + k] = s.weight[k];
      }
    }
    std::vector<double> z(dim_);
    for (std::size_t k = 0; k < rep.pattern.size(); ++k) {
      rep.field.evaluate(rep.pattern.point(k), z);
      event_cov_.insert(event_cov_.end(), z.begin(), z.end());
      const Stencil s = basis.stencil(z);
      for (std::size_t j = 0; j < stride_; ++j) {
        event_index_.push_back(s.index[j]);
        event_weight_.push_back(s.weight[j]);
      }
    }
    event_offset_.push_back(event_offset_.back() + rep.pattern.size());
  }
  total_events_ = event_offset_.back();
}

std::span<const double> LikelihoodContext::node_covariates(std::size_t i) const {
  const std::size_t Q = quadrature_.size();
  return {node_cov_.data() + i * Q * dim_, Q * dim_};
}

std::span<const double> LikelihoodContext::event_covariates(std::size_t i) const {
  return {event_cov_.data() + event_offset_[i] * dim_, events(i) * dim_};
}

namespace {

template <std::size_t Stride>
inline double interp(const std::uint32_t* idx, const double* wt, const double* w) {
  double v = 0.0;
  for (std::size_t k = 0; k < Stride; ++k) v += wt[k] * w[idx[k]];
  return v;
}

template <std::size_t Stride>
void accumulate(std::size_t Q, const std::uint32_t* nidx, const double* nwt, const double* qweights,
                std::size_t K, const std::uint32_t* eidx, const double* ewt, const double* w, double& sig,
                double& elog) {
  double s = 0.0;
  for (std::size_t q = 0; q < Q; ++q) {
    s += qweights[q] * sigmoid(interp<Stride>(nidx + q * Stride, nwt + q * Stride, w));
  }
  double e = 0.0;
  for (std::size_t k = 0; k < K; ++k) e += log_sigmoid(interp<Stride>(eidx + k * Stride, ewt + k * Stride, w));
  sig = s;
  elog = e;
}

}  // namespace

void LikelihoodContext::replicate_terms(std::size_t i, const double* w, double& sig, double& elog) const {
  const std::size_t Q = quadrature_.size();
  const std::uint32_t* nidx = node_index_.data() + i * Q * stride_;
  const double* nwt = node_weight_.data() + i * Q * stride_;
  const std::size_t K = events(i);
  const std::uint32_t* eidx = event_index_.data() + event_offset_[i] * stride_;
  const double* ewt = event_weight_.data() + event_offset_[i] * stride_;
  const double* qw = quadrature_.weights.data();
  switch (stride_) {
    case 2: accumulate<2>(Q, nidx, nwt, qw, K, eidx, ewt, w, sig, elog); break;
    case 3: accumulate<3>(Q, nidx, nwt, qw, K, eidx, ewt, w, sig, elog); break;
    case 8: accumulate<8>(Q, nidx, nwt, qw, K, eidx, ewt, w, sig, elog); break;
    default: throw Error("likelihood: unsupported stencil size");
  }
}

LikelihoodContext::WTerms LikelihoodContext::evaluate(const Eigen::VectorXd& w, ThreadPool* pool) const {
  require(static_cast<std::size_t>(w.size()) == basis_size_, "likelihood: w has wrong length");
  require(w.allFinite(), "likelihood: w is not finite");
  std::vector<double> sig(replicates_), elog(replicates_);
  auto body = [&](std::size_t i) { replicate_terms(i, w.data(), sig[i], elog[i]); };
  if (pool) {
    pool->parallel_for(replicates_, body);
  } else {
    for (std::size_t i = 0; i < replicates_; ++i) body(i);
  }
  return WTerms{pairwise_sum(sig.data(), sig.size()), pairwise_sum(elog.data(), elog.size())};
}

double LikelihoodContext::log_likelihood(const WTerms& terms, double rho_star) const {
  require(rho_star > 0.0 && std::isfinite(rho_star), "likelihood: rho_star must be positive and finite");
  const double value = static_cast<double>(total_events_) * std::log(rho_star) + terms.event_log_sigma -
                       (rho_star * terms.sigma_integral - static_cast<double>(replicates_) * volume_);
  if (!std::isfinite(value)) throw Error("likelihood: intensity vanishes at an observed event");
  return value;
}

double log_likelihood(const LikelihoodContext& ctx, const LatentState& state, ThreadPool* pool) {
  return ctx.log_likelihood(ctx.evaluate(state.w, pool), state.rho_star);
}

double integral_of_sigma(const LikelihoodContext& ctx, const LatentState& state, ThreadPool* pool) {
  return ctx.evaluate(state.w, pool).sigma_integral;
}

}  // namespace coxgp
