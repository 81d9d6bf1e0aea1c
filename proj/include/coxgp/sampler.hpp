#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "coxgp/cox_sim.hpp"
#include "coxgp/geometry.hpp"
#include "coxgp/likelihood.hpp"
#include "coxgp/model.hpp"
#include "coxgp/rng.hpp"

namespace coxgp {

class ThreadPool;

enum class StartMode { Prior, Deterministic };

/// How the length-scale block visits coordinates: one scalar MH step per
/// coordinate in turn, or one joint MH step on the whole vector (experimental).
enum class EllUpdate { Sequential, Joint };

struct ArwmConfig {
  double initial_log_sd = -0.5;  // log of the proposal sd on the log(ell) scale
  double target_acceptance = 0.3;
  double rate_exponent = 0.6;     // Robbins-Monro gain t^-rate
};

struct SamplerConfig {
  std::size_t iterations = 20000;
  std::size_t burn_in = 5000;
  double zeta = 0.05;
  /// Doubles/halves zeta during burn-in towards 20-40% pCN acceptance.
  bool tune_zeta = false;
  std::size_t tune_window = 50;
  std::size_t pcn_steps = 1;
  /// Keep every thin-th sweep in ChainTrace::states.
  std::size_t thin = 1;
  std::uint64_t seed = 0;
  ArwmConfig arwm;
  StartMode start = StartMode::Prior;
  EllUpdate ell_update = EllUpdate::Sequential;

  void validate() const;
};

/// Scalar Robbins-Monro adaptation of the random-walk scale.
class ArwmAdapter {
 public:
  explicit ArwmAdapter(const ArwmConfig& config) : config_(config), log_sd_(config.initial_log_sd) {}

  double sd() const;
  double log_sd() const { return log_sd_; }
  bool frozen() const { return frozen_; }
  void freeze() { frozen_ = true; }
  void update(double acceptance_probability);

 private:
  ArwmConfig config_;
  double log_sd_;
  std::size_t steps_ = 0;
  bool frozen_ = false;
};

/// Draws rho* from Gamma(a_rho + total_events, b_rho + sigma_integral).
void gibbs_rho_star(LatentState& state, double sigma_integral, std::size_t total_events, const HyperParams& hyper,
                    Rng& rng);

/// Unnormalized log full conditional of a length-scale exponent.
double theta_log_target(double theta, double ell, const HyperParams& hyper, std::size_t d);

/// log of the independence-sampler acceptance ratio for theta -> proposed.
double theta_log_acceptance(double theta, double proposed, double ell, const HyperParams& hyper, std::size_t d);

bool mh_theta(LatentState& state, std::size_t j, const HyperParams& hyper, Rng& rng);

/// Hyper-prior part of the length-scale full conditional,
/// (a_gamma d / theta - 1) log ell - b_gamma ell^(d / theta).
double ell_log_hyperprior(double ell, double theta, const HyperParams& hyper, std::size_t d);

struct EllMove {
  bool accepted = false;
  bool factorization_failed = false;
  double acceptance_probability = 0.0;
};

/// MH decision for replacing ell_j by `proposed`, with the log-scale
/// random-walk Jacobian; `log_u` is the log of the uniform variate.
EllMove propose_ell(LatentState& state, std::size_t j, double proposed, const HyperParams& hyper,
                    const ArdKernel& kernel, double log_u);

EllMove arwm_ell(LatentState& state, std::size_t j, const HyperParams& hyper, const ArdKernel& kernel,
                 ArwmAdapter& adapter, Rng& rng);

/// One joint log-scale random-walk move on the whole ell vector.
EllMove arwm_ell_joint(LatentState& state, const HyperParams& hyper, const ArdKernel& kernel, ArwmAdapter& adapter,
                       Rng& rng);

using WLogLikelihood = std::function<double(const Eigen::VectorXd&)>;

struct PcnResult {
  bool accepted = false;
  double loglik = 0.0;
};

/// One preconditioned Crank-Nicolson step on w under prior N(0, L L^T):
/// proposal sqrt(1 - 2 zeta) w + sqrt(2 zeta) xi, zeta in (0, 1/2].
PcnResult pcn_step(Eigen::VectorXd& w, double current_loglik, const CholeskyFactor& factor, double zeta,
                   const WLogLikelihood& loglik, Rng& rng);

bool pcn_w(LatentState& state, const LikelihoodContext& ctx, double zeta, Rng& rng, ThreadPool* pool = nullptr);

struct StateSnapshot {
  std::size_t sweep = 0;
  double rho_star = 0.0;
  std::vector<double> theta;
  std::vector<double> ell;
  std::vector<double> w;
};

struct SweepRecord {
  std::size_t sweep = 0;
  double rho_star = 0.0;
  std::vector<double> theta;
  std::vector<double> ell;
  double loglik = 0.0;
  std::vector<std::uint8_t> theta_accepted;
  std::vector<std::uint8_t> ell_accepted;
  std::uint32_t pcn_accepted = 0;
  double zeta = 0.0;
};

struct AcceptanceCounts {
  std::size_t sweeps = 0;
  std::vector<std::uint64_t> theta;
  std::vector<std::uint64_t> ell;
  std::vector<std::uint64_t> ell_proposals;
  std::vector<std::uint64_t> ell_factor_failures;
  std::uint64_t pcn = 0;
  std::uint64_t pcn_proposals = 0;

  double pcn_rate() const;
  double theta_rate(std::size_t j) const;
  double ell_rate(std::size_t j) const;
};

/// Sweep 0 is the initial state; sweeps 1..iterations follow.
struct ChainTrace {
  std::size_t dim = 0;
  std::size_t basis_size = 0;
  std::size_t burn_in = 0;
  std::vector<SweepRecord> sweeps;
  std::vector<StateSnapshot> states;
  AcceptanceCounts counts;
  /// Counts restricted to post-burn-in sweeps.
  AcceptanceCounts post_burn_in;
  double final_zeta = 0.0;
  std::vector<double> final_log_sd;
};

ChainTrace run_chain(const LikelihoodContext& ctx, const InterpolationBasis& basis, const HyperParams& hyper,
                     const SamplerConfig& config, ThreadPool* pool = nullptr);

ChainTrace run_chain(const Dataset& dataset, const InterpolationBasis& basis, const QuadratureRule& quadrature,
                     const HyperParams& hyper, const SamplerConfig& config, ThreadPool* pool = nullptr);

}  // namespace coxgp
