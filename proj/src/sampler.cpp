#include "coxgp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coxgp/error.hpp"
#include "coxgp/parallel.hpp"

namespace coxgp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kMainStream = 1;
constexpr std::uint64_t kThetaStream = 2;
constexpr double kMinZeta = 1e-6;
constexpr double kMaxZeta = 0.49;

// ell^(d/theta) without intermediate overflow surprises: inf is a valid answer.
double power_ratio(double ell, double theta, std::size_t d) {
  return std::exp(static_cast<double>(d) / theta * std::log(ell));
}

}  // namespace

void SamplerConfig::validate() const {
  require(zeta > 0.0 && zeta < 0.5, "sampler: zeta must lie in (0, 1/2)");
  require(iterations == 0 ? burn_in == 0 : burn_in < iterations, "sampler: burn_in must be < iterations");
  require(thin >= 1, "sampler: thin must be >= 1");
  require(pcn_steps >= 1, "sampler: pcn_steps must be >= 1");
  require(tune_window >= 1, "sampler: tune_window must be >= 1");
  require(arwm.target_acceptance > 0.0 && arwm.target_acceptance < 1.0, "sampler: arwm target must be in (0,1)");
  require(arwm.rate_exponent > 0.5 && arwm.rate_exponent <= 1.0, "sampler: arwm rate exponent must be in (1/2, 1]");
}

double ArwmAdapter::sd() const { return std::exp(log_sd_); }

void ArwmAdapter::update(double acceptance_probability) {
  if (frozen_) return;
  ++steps_;
  const double gain = std::pow(static_cast<double>(steps_), -config_.rate_exponent);
  log_sd_ += gain * (acceptance_probability - config_.target_acceptance);
  log_sd_ = std::clamp(log_sd_, -12.0, 3.0);
}

void gibbs_rho_star(LatentState& state, double sigma_integral, std::size_t total_events, const HyperParams& hyper,
                    Rng& rng) {
  require(std::isfinite(sigma_integral) && sigma_integral >= 0.0, "gibbs_rho_star: invalid sigma integral");
  state.rho_star = rng.gamma(hyper.a_rho + static_cast<double>(total_events), hyper.b_rho + sigma_integral);
  // Gamma draws can underflow to zero for tiny shapes; keep rho* in (0, inf).
  if (state.rho_star <= 0.0) state.rho_star = std::numeric_limits<double>::min();
}

double theta_log_target(double theta, double ell, const HyperParams& hyper, std::size_t d) {
  if (!(theta > 0.0 && theta < 1.0)) return kNegInf;
  const double dd = static_cast<double>(d);
  return hyper.a_gamma * dd / theta * std::log(ell) - hyper.b_gamma * power_ratio(ell, theta, d) +
         (hyper.a_theta - 2.0) * std::log(theta) + (hyper.b_theta - 1.0) * std::log1p(-theta);
}

double theta_log_acceptance(double theta, double proposed, double ell, const HyperParams& hyper, std::size_t d) {
  // The Beta(a_theta, b_theta) proposal cancels against the target up to 1/theta.
  const auto part = [&](double t) {
    const double dd = static_cast<double>(d);
    return hyper.a_gamma * dd / t * std::log(ell) - hyper.b_gamma * power_ratio(ell, t, d) - std::log(t);
  };
  const double num = part(proposed);
  const double den = part(theta);
  if (num == kNegInf) return kNegInf;
  if (den == kNegInf) return 0.0;
  return num - den;
}

bool mh_theta(LatentState& state, std::size_t j, const HyperParams& hyper, Rng& rng) {
  require(j < state.dim(), "mh_theta: coordinate out of range");
  const double proposed = rng.beta(hyper.a_theta, hyper.b_theta);
  if (!(proposed > 0.0 && proposed < 1.0)) return false;
  const double log_alpha = theta_log_acceptance(state.theta[j], proposed, state.ell()[j], hyper, state.dim());
  const double log_u = std::log(rng.uniform_open());
  if (log_u < log_alpha) {
    state.theta[j] = proposed;
    return true;
  }
  return false;
}

double ell_log_hyperprior(double ell, double theta, const HyperParams& hyper, std::size_t d) {
  if (!(ell > 0.0)) return kNegInf;
  const double dd = static_cast<double>(d);
  return (hyper.a_gamma * dd / theta - 1.0) * std::log(ell) - hyper.b_gamma * power_ratio(ell, theta, d);
}

namespace {

EllMove decide_ell(LatentState& state, std::vector<double> proposed_ell, const HyperParams& hyper,
                   const ArdKernel& kernel, double log_u) {
  EllMove move;
  const std::size_t d = state.dim();
  double log_ratio = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double cur = state.ell()[j];
    const double prop = proposed_ell[j];
    if (!(prop > 0.0) || !std::isfinite(prop)) return move;
    if (prop == cur) continue;
    const double lp_new = ell_log_hyperprior(prop, state.theta[j], hyper, d);
    const double lp_old = ell_log_hyperprior(cur, state.theta[j], hyper, d);
    log_ratio += lp_new - lp_old + std::log(prop) - std::log(cur);
  }
  if (std::isnan(log_ratio) || log_ratio == kNegInf) return move;

  CholeskyFactor factor;
  if (!kernel.try_factorize(proposed_ell, factor)) {
    move.factorization_failed = true;
    return move;
  }
  log_ratio += log_prior_w(state.w, factor) - log_prior_w(state.w, state.factor());
  if (std::isnan(log_ratio)) return move;
  move.acceptance_probability = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
  if (log_u < log_ratio) {
    state.set_ell(std::move(proposed_ell), std::move(factor));
    move.accepted = true;
  }
  return move;
}

}  // namespace

EllMove propose_ell(LatentState& state, std::size_t j, double proposed, const HyperParams& hyper,
                    const ArdKernel& kernel, double log_u) {
  require(j < state.dim(), "propose_ell: coordinate out of range");
  std::vector<double> ell = state.ell();
  ell[j] = proposed;
  return decide_ell(state, std::move(ell), hyper, kernel, log_u);
}

EllMove arwm_ell(LatentState& state, std::size_t j, const HyperParams& hyper, const ArdKernel& kernel,
                 ArwmAdapter& adapter, Rng& rng) {
  const double proposed = std::exp(std::log(state.ell()[j]) + adapter.sd() * rng.normal());
  const double log_u = std::log(rng.uniform_open());
  EllMove move = propose_ell(state, j, proposed, hyper, kernel, log_u);
  adapter.update(move.acceptance_probability);
  return move;
}

EllMove arwm_ell_joint(LatentState& state, const HyperParams& hyper, const ArdKernel& kernel, ArwmAdapter& adapter,
                       Rng& rng) {
  std::vector<double> ell = state.ell();
  for (auto& l : ell) l = std::exp(std::log(l) + adapter.sd() * rng.normal());
  const double log_u = std::log(rng.uniform_open());
  EllMove move = decide_ell(state, std::move(ell), hyper, kernel, log_u);
  adapter.update(move.acceptance_probability);
  return move;
}

PcnResult pcn_step(Eigen::VectorXd& w, double current_loglik, const CholeskyFactor& factor, double zeta,
                   const WLogLikelihood& loglik, Rng& rng) {
  require(zeta > 0.0 && zeta <= 0.5, "pcn: zeta must lie in (0, 1/2]");
  const Eigen::VectorXd xi = draw_prior_w(factor, rng);
  const Eigen::VectorXd proposal = std::sqrt(1.0 - 2.0 * zeta) * w + std::sqrt(2.0 * zeta) * xi;
  const double proposed_loglik = loglik(proposal);
  const double log_u = std::log(rng.uniform_open());
  if (log_u < proposed_loglik - current_loglik) {
    w = proposal;
    return {true, proposed_loglik};
  }
  return {false, current_loglik};
}

bool pcn_w(LatentState& state, const LikelihoodContext& ctx, double zeta, Rng& rng, ThreadPool* pool) {
  const double rho_star = state.rho_star;
  const WLogLikelihood lik = [&](const Eigen::VectorXd& w) { return ctx.log_likelihood(ctx.evaluate(w, pool), rho_star); };
  const double current = lik(state.w);
  return pcn_step(state.w, current, state.factor(), zeta, lik, rng).accepted;
}

double AcceptanceCounts::pcn_rate() const {
  return pcn_proposals ? static_cast<double>(pcn) / static_cast<double>(pcn_proposals) : 0.0;
}

double AcceptanceCounts::theta_rate(std::size_t j) const {
  return sweeps ? static_cast<double>(theta.at(j)) / static_cast<double>(sweeps) : 0.0;
}

double AcceptanceCounts::ell_rate(std::size_t j) const {
  return ell_proposals.at(j) ? static_cast<double>(ell.at(j)) / static_cast<double>(ell_proposals[j]) : 0.0;
}

namespace {

AcceptanceCounts empty_counts(std::size_t d) {
  AcceptanceCounts c;
  c.theta.assign(d, 0);
  c.ell.assign(d, 0);
  c.ell_proposals.assign(d, 0);
  c.ell_factor_failures.assign(d, 0);
  return c;
}

StateSnapshot snapshot(const LatentState& s, std::size_t sweep) {
  return StateSnapshot{sweep, s.rho_star, s.theta, s.ell(), std::vector<double>(s.w.data(), s.w.data() + s.w.size())};
}

// Bisection in log2(zeta): starts by doubling/halving and halves the step
// each time the direction flips.
class ZetaTuner {
 public:
  explicit ZetaTuner(double zeta) : zeta_(zeta) {}
  double zeta() const { return zeta_; }
  void observe(double rate) {
    int dir = 0;
    if (rate > 0.4) dir = 1;
    if (rate < 0.2) dir = -1;
    if (dir == 0) return;
    if (last_ != 0 && dir != last_) step_ *= 0.5;
    last_ = dir;
    zeta_ = std::clamp(zeta_ * std::exp2(dir * step_), kMinZeta, kMaxZeta);
  }

 private:
  double zeta_;
  double step_ = 1.0;
  int last_ = 0;
};

}  // namespace

ChainTrace run_chain(const LikelihoodContext& ctx, const InterpolationBasis& basis, const HyperParams& hyper,
                     const SamplerConfig& config, ThreadPool* pool) {
  config.validate();
  hyper.validate();
  require(ctx.basis_size() == basis.size(), "run_chain: basis does not match the likelihood context");
  const std::size_t d = basis.dim();
  const ArdKernel kernel(basis);
  Rng rng(derive_seed(config.seed, kMainStream));

  LatentState state = config.start == StartMode::Prior ? sample_prior(hyper, kernel, rng)
                                                       : deterministic_start(hyper, kernel);

  ChainTrace trace;
  trace.dim = d;
  trace.basis_size = basis.size();
  trace.burn_in = config.burn_in;
  trace.counts = empty_counts(d);
  trace.post_burn_in = empty_counts(d);
  trace.sweeps.reserve(config.iterations + 1);

  LikelihoodContext::WTerms terms = ctx.evaluate(state.w, pool);
  ZetaTuner tuner(config.zeta);
  std::vector<ArwmAdapter> adapters(config.ell_update == EllUpdate::Joint ? 1 : d, ArwmAdapter(config.arwm));

  auto record = [&](std::size_t sweep, const std::vector<std::uint8_t>& ta, const std::vector<std::uint8_t>& ea,
                    std::uint32_t pcn) {
    trace.sweeps.push_back(SweepRecord{sweep, state.rho_star, state.theta, state.ell(),
                                       ctx.log_likelihood(terms, state.rho_star), ta, ea, pcn, tuner.zeta()});
    if (sweep % config.thin == 0) trace.states.push_back(snapshot(state, sweep));
  };
  record(0, std::vector<std::uint8_t>(d, 0), std::vector<std::uint8_t>(d, 0), 0);

  std::uint64_t window_accepts = 0;
  std::uint64_t window_props = 0;
  for (std::size_t sweep = 1; sweep <= config.iterations; ++sweep) {
    const bool burning = sweep <= config.burn_in;
    if (!burning) {
      for (auto& a : adapters) a.freeze();
    }
    AcceptanceCounts& post = trace.post_burn_in;
    if (!burning) ++post.sweeps;
    ++trace.counts.sweeps;

    // (1) rho*
    gibbs_rho_star(state, terms.sigma_integral, ctx.total_events(), hyper, rng);

    // (2) theta_j: per-(sweep, j) streams so the order of execution is irrelevant
    std::vector<std::uint8_t> theta_acc(d, 0);
    for (std::size_t j = 0; j < d; ++j) {
      Rng sub(derive_seed(config.seed, kThetaStream, sweep * d + j));
      theta_acc[j] = mh_theta(state, j, hyper, sub) ? 1 : 0;
    }

    // (3) ell
    std::vector<std::uint8_t> ell_acc(d, 0);
    if (config.ell_update == EllUpdate::Sequential) {
      for (std::size_t j = 0; j < d; ++j) {
        const EllMove m = arwm_ell(state, j, hyper, kernel, adapters[j], rng);
        ell_acc[j] = m.accepted ? 1 : 0;
        ++trace.counts.ell_proposals[j];
        if (m.factorization_failed) ++trace.counts.ell_factor_failures[j];
        if (!burning) {
          ++post.ell_proposals[j];
          if (m.factorization_failed) ++post.ell_factor_failures[j];
        }
      }
    } else {
      const EllMove m = arwm_ell_joint(state, hyper, kernel, adapters[0], rng);
      for (std::size_t j = 0; j < d; ++j) {
        ell_acc[j] = m.accepted ? 1 : 0;
        ++trace.counts.ell_proposals[j];
        if (m.factorization_failed) ++trace.counts.ell_factor_failures[j];
        if (!burning) {
          ++post.ell_proposals[j];
          if (m.factorization_failed) ++post.ell_factor_failures[j];
        }
      }
    }

    // (4) w by pCN; likelihood terms of the current w are cached
    std::uint32_t pcn_acc = 0;
    const double rho_star = state.rho_star;
    LikelihoodContext::WTerms proposal_terms;
    const WLogLikelihood lik = [&](const Eigen::VectorXd& w) {
      proposal_terms = ctx.evaluate(w, pool);
      return ctx.log_likelihood(proposal_terms, rho_star);
    };
    double current = ctx.log_likelihood(terms, rho_star);
    for (std::size_t s = 0; s < config.pcn_steps; ++s) {
      const PcnResult r = pcn_step(state.w, current, state.factor(), tuner.zeta(), lik, rng);
      if (r.accepted) {
        terms = proposal_terms;
        current = r.loglik;
        ++pcn_acc;
      }
    }

    for (std::size_t j = 0; j < d; ++j) {
      trace.counts.theta[j] += theta_acc[j];
      trace.counts.ell[j] += ell_acc[j];
      if (!burning) {
        post.theta[j] += theta_acc[j];
        post.ell[j] += ell_acc[j];
      }
    }
    trace.counts.pcn += pcn_acc;
    trace.counts.pcn_proposals += config.pcn_steps;
    if (!burning) {
      post.pcn += pcn_acc;
      post.pcn_proposals += config.pcn_steps;
    }

    if (burning && config.tune_zeta) {
      window_accepts += pcn_acc;
      window_props += config.pcn_steps;
      if (sweep % config.tune_window == 0) {
        tuner.observe(static_cast<double>(window_accepts) / static_cast<double>(window_props));
        window_accepts = 0;
        window_props = 0;
      }
    }

    record(sweep, theta_acc, ell_acc, pcn_acc);
  }

  trace.final_zeta = tuner.zeta();
  for (const auto& a : adapters) trace.final_log_sd.push_back(a.log_sd());
  return trace;
}

ChainTrace run_chain(const Dataset& dataset, const InterpolationBasis& basis, const QuadratureRule& quadrature,
                     const HyperParams& hyper, const SamplerConfig& config, ThreadPool* pool) {
  const LikelihoodContext ctx(dataset, quadrature, basis);
  return run_chain(ctx, basis, hyper, config, pool);
}

}  // namespace coxgp
