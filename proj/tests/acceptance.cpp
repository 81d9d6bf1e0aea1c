// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// here. A criterion whose only failing checks are listed as known
// unattainable prints FAIL with the reason but does not fail the exit code.

#include <CLI11.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "coxgp/config.hpp"
#include "coxgp/experiment.hpp"
#include "coxgp/io.hpp"
#include "coxgp/parallel.hpp"
#include "coxgp/sampler.hpp"
#include "coxgp/summaries.hpp"
#include "oracles.hpp"

using namespace coxgp;
namespace fs = std::filesystem;

namespace {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
  /// Non-empty when the check is documented as unattainable.
  std::string known_unattainable;
};

struct Outcome {
  std::vector<Check> checks;

  void add(std::string name, bool pass, std::string detail, std::string known = {}) {
    checks.push_back({std::move(name), pass, std::move(detail), std::move(known)});
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CovariateField linear_field() {
  FieldGrid grid(Window::centered_unit_square(), {2, 2});
  return CovariateField(grid, 1, {0.0, 0.0, 1.0, 1.0});
}

// 1: conjugate block.
Outcome criterion1() {
  Outcome o;
  const auto basis = build_basis({1, 2, 0.0});
  ArdKernel kernel(basis);
  LatentState s(1.0, {0.5}, {1.0}, Eigen::VectorXd::Zero(2), kernel);
  const HyperParams hyper;
  const std::size_t events = 12;
  const double integral = 3.4;
  const int n = 100000;
  Rng rng(derive_seed(1, 1));
  std::vector<double> draws(n);
  for (auto& d : draws) {
    gibbs_rho_star(s, integral, events, hyper, rng);
    d = s.rho_star;
  }
  const double shape = hyper.a_rho + static_cast<double>(events);
  const double rate = hyper.b_rho + integral;
  const double ks = oracle::ks_statistic(draws, [&](double x) { return boost::math::gamma_p(shape, rate * x); });
  const double critical = 1.628 / std::sqrt(static_cast<double>(n));
  o.add("ks", ks < critical, "KS " + fmt(ks) + " vs 1% critical " + fmt(critical) + " for Gamma(13, 5.4)");
  return o;
}

// 2: pCN prior invariance under a flat likelihood.
Outcome criterion2() {
  Outcome o;
  const std::vector<double> nodes{0.0, 0.5, 1.0};
  ArdKernel kernel(nodes, 1);
  const auto factor = kernel.factorize(std::vector<double>{2.0});
  const int sweeps = 100000;
  const auto flat = [](const Eigen::VectorXd&) { return 0.0; };
  for (double zeta : {0.05, 0.25, 0.49}) {
    Rng rng(derive_seed(2, static_cast<std::uint64_t>(zeta * 100)));
    Eigen::VectorXd w = draw_prior_w(factor, rng);
    std::vector<std::vector<double>> trace(3, std::vector<double>(sweeps));
    for (int s = 0; s < sweeps; ++s) {
      pcn_step(w, 0.0, factor, zeta, flat, rng);
      for (int v = 0; v < 3; ++v) trace[v][s] = w[v];
    }
    // Under the prior each coordinate is AR(1) with coefficient sqrt(1 - 2 zeta).
    const double phi = std::sqrt(1.0 - 2.0 * zeta);
    const double iat = (1.0 + phi) / (1.0 - phi);
    const double se = std::sqrt(iat / sweeps);
    double worst_mean = 0.0, worst_var = 0.0;
    bool ok = true;
    for (int v = 0; v < 3; ++v) {
      const double m = oracle::mean(trace[v]);
      const double var = oracle::variance(trace[v]);
      worst_mean = std::max(worst_mean, std::abs(m) / se);
      worst_var = std::max(worst_var, std::abs(var - 1.0));
      ok = ok && std::abs(m) < 3.0 * se && std::abs(var - 1.0) < 0.05;
    }
    o.add("zeta=" + fmt(zeta), ok,
          "zeta " + fmt(zeta) + ": max |mean|/SE " + fmt(worst_mean, 3) + " (< 3), max |var-1| " + fmt(worst_var, 3) +
              " (< 0.05)");
  }
  return o;
}

// 3: theta and ell chains against numerically normalized 1-d targets.
Outcome criterion3() {
  Outcome o;
  const HyperParams hyper;
  const int draws = 200000;
  {
    const double ell = 2.0;
    std::vector<double> grid, logd;
    grid.push_back(0.0);
    logd.push_back(-1e300);
    for (int i = 0; i < 10000; ++i) {
      const double t = (i + 0.5) / 10000.0;
      grid.push_back(t);
      logd.push_back((hyper.a_theta - 2.0) * std::log(t) + (hyper.b_theta - 1.0) * std::log(1.0 - t) +
                     hyper.a_gamma / t * std::log(ell) - hyper.b_gamma * std::pow(ell, 1.0 / t));
    }
    grid.push_back(1.0);
    logd.push_back(-1e300);
    const oracle::TabulatedCdf cdf(grid, logd);

    const auto basis = build_basis({1, 2, 0.0});
    ArdKernel kernel(basis);
    LatentState s(1.0, {0.5}, {ell}, Eigen::VectorXd::Zero(2), kernel);
    Rng rng(derive_seed(3, 1));
    std::vector<double> xs(draws);
    for (auto& x : xs) {
      mh_theta(s, 0, hyper, rng);
      x = s.theta[0];
    }
    const double ks = oracle::ks_statistic(xs, [&](double v) { return cdf(v); });
    o.add("theta", ks < 0.01, "theta KS " + fmt(ks) + " (< 0.01)");
  }
  {
    const std::vector<double> nodes{0.0, 0.5, 1.0};
    ArdKernel kernel(nodes, 1);
    const double theta = 0.5;
    const double nugget = 1e-10;
    Eigen::Vector3d w(0.4, -0.3, 0.8);
    // Closed-form 3x3 determinant and quadratic form of C + nugget I.
    const auto log_target = [&](double l) {
      const double a = 1.0 + nugget, b = std::exp(-0.25 * l), c = std::exp(-l);
      const double det = a * (a * a - b * b) - b * (b * a - b * c) + c * (b * b - a * c);
      const double i00 = a * a - b * b, i01 = -(b * a - c * b), i02 = b * b - a * c;
      const double i11 = a * a - c * c, i12 = -(a * b - b * c), i22 = a * a - b * b;
      const double quad = (i00 * w[0] * w[0] + i11 * w[1] * w[1] + i22 * w[2] * w[2] + 2.0 * i01 * w[0] * w[1] +
                           2.0 * i02 * w[0] * w[2] + 2.0 * i12 * w[1] * w[2]) /
                          det;
      return (hyper.a_gamma / theta - 1.0) * std::log(l) - hyper.b_gamma * std::pow(l, 1.0 / theta) - 0.5 * quad -
             0.5 * std::log(det);
    };
    std::vector<double> grid, logd;
    const double top = 8.0;
    for (int i = 1; i <= 200000; ++i) {
      const double l = top * i / 200000.0;
      grid.push_back(l);
      logd.push_back(log_target(l));
    }
    const oracle::TabulatedCdf cdf(grid, logd);

    LatentState s(1.0, {theta}, {1.0}, w, kernel);
    Rng rng(derive_seed(3, 2));
    ArwmAdapter adapter(ArwmConfig{});
    for (int i = 0; i < 20000; ++i) arwm_ell(s, 0, hyper, kernel, adapter, rng);
    adapter.freeze();
    std::vector<double> xs(draws);
    for (auto& x : xs) {
      arwm_ell(s, 0, hyper, kernel, adapter, rng);
      x = s.ell()[0];
    }
    const double ks = oracle::ks_statistic(xs, [&](double v) { return cdf(v); });
    o.add("ell", ks < 0.015, "ell KS " + fmt(ks) + " (< 0.015, frozen sd " + fmt(adapter.sd(), 6) + ")");
  }
  return o;
}

// 4: thinning calibration.
Outcome criterion4(ThreadPool& pool) {
  Outcome o;
  const std::size_t reps = 10000;
  const auto data = simulate_dataset(reps, Window::centered_unit_square(), FieldConfig{},
                                     TruthSpec::from_name("skew_normal_1d"), derive_seed(4, 1), &pool);
  const double mean = static_cast<double>(data.total_events()) / static_cast<double>(reps);
  o.add("skew-normal mean", std::abs(mean - 5.0) <= 0.3, "mean count " + fmt(mean) + " (5 +- 0.3)");

  const auto field = linear_field();
  Rng rng(derive_seed(4, 2));
  for (double c : {1.0, 5.0, 20.0}) {
    std::vector<double> counts(reps);
    for (auto& k : counts) {
      k = static_cast<double>(simulate_cox(field, [&](std::span<const double>) { return c; }, c, rng).size());
    }
    const double ratio = oracle::variance(counts) / oracle::mean(counts);
    o.add("dispersion c=" + fmt(c), std::abs(ratio - 1.0) < 0.1,
          "c=" + fmt(c) + " var/mean " + fmt(ratio) + " (1 +- 0.1)");
  }
  return o;
}

struct Range {
  double center, sd;
  double lo() const { return center - 3.0 * sd; }
  double hi() const { return center + 3.0 * sd; }
  bool contains(double v) const { return v >= lo() && v <= hi(); }
};

std::map<std::size_t, ExperimentReport> g_desk_reports;

const ExperimentReport& desk_report(const std::vector<std::size_t>& sizes, ThreadPool& pool) {
  auto cfg = preset("desk-1d");
  cfg.sample_sizes = sizes;
  std::vector<std::size_t> missing;
  for (std::size_t n : sizes) {
    if (!g_desk_reports.count(n)) missing.push_back(n);
  }
  for (std::size_t n : missing) {
    cfg.sample_sizes = {n};
    cfg.replications = n >= 1000 ? 3 : 5;
    g_desk_reports.emplace(n, run_experiment(cfg, false, &pool));
  }
  return g_desk_reports.at(sizes.front());
}

double report_value(const ExperimentReport& r, const std::string& est, const std::string& metric) {
  const auto* row = r.row(est, metric);
  return row ? row->mean[0] : std::nan("");
}

// 5: desk-scale slice of the 1-d table.
Outcome criterion5(ThreadPool& pool) {
  Outcome o;
  desk_report({50, 250}, pool);
  const std::map<std::size_t, std::pair<Range, Range>> ranges{{50, {{0.19, 0.05}, {0.18, 0.05}}},
                                                              {250, {{0.09, 0.01}, {0.15, 0.019}}}};
  for (const auto& [n, rr] : ranges) {
    const auto& rep = g_desk_reports.at(n);
    const double post = report_value(rep, "posterior_mean", "rel_l2");
    const double kern = report_value(rep, "kernel", "rel_l2");
    const double pcn = report_value(rep, "posterior_mean", "pcn_acceptance");
    const double cover = report_value(rep, "posterior_mean", "coverage");
    o.add("posterior n=" + std::to_string(n), rr.first.contains(post),
          "n=" + std::to_string(n) + " posterior " + fmt(post, 3) + " in [" + fmt(rr.first.lo(), 3) + ", " +
              fmt(rr.first.hi(), 3) + "]");
    o.add("kernel n=" + std::to_string(n), rr.second.contains(kern),
          "kernel " + fmt(kern, 3) + " in [" + fmt(rr.second.lo(), 3) + ", " + fmt(rr.second.hi(), 3) + "]");
    o.add("pcn n=" + std::to_string(n), pcn >= 0.15 && pcn <= 0.45,
          "pCN acceptance " + fmt(pcn, 3) + " in [0.15, 0.45]; band coverage " + fmt(cover, 3));
  }
  return o;
}

// 6: contraction trend.
Outcome criterion6(ThreadPool& pool) {
  Outcome o;
  desk_report({50, 250, 1000}, pool);
  std::vector<double> post, kern;
  for (std::size_t n : {50u, 250u, 1000u}) {
    post.push_back(report_value(g_desk_reports.at(n), "posterior_mean", "rel_l2"));
    kern.push_back(report_value(g_desk_reports.at(n), "kernel", "rel_l2"));
  }
  const bool decreasing = post[0] > post[1] && post[1] > post[2];
  o.add("decreasing", decreasing,
        "posterior rel L2 " + fmt(post[0], 3) + " > " + fmt(post[1], 3) + " > " + fmt(post[2], 3) +
            " (kernel " + fmt(kern[0], 3) + ", " + fmt(kern[1], 3) + ", " + fmt(kern[2], 3) + ")");
  return o;
}

// 7: anisotropy adaptation.
Outcome criterion7(ThreadPool& pool) {
  Outcome o;
  const auto cfg = preset("desk-2d");
  const auto rep = run_experiment(cfg, false, &pool);
  const double l1 = report_value(rep, "posterior_mean", "ell_1");
  const double l2 = report_value(rep, "posterior_mean", "ell_2");
  const double rel = report_value(rep, "posterior_mean", "rel_l2");
  o.add("ratio", l1 / l2 >= 3.0,
        "ell1 " + fmt(l1, 3) + ", ell2 " + fmt(l2, 3) + ", ratio " + fmt(l1 / l2, 3) + " (>= 3); rel L2 " +
            fmt(rel, 3));
  return o;
}

// Toy joint posterior by dense quadrature over (rho*, theta, gamma, w1, w2),
// with ell = gamma^theta (d = 1).
std::vector<double> brute_force_posterior(const Dataset& data, std::size_t cells, const HyperParams& hyper,
                                          const std::vector<double>& zs) {
  const auto& rep = data[0];
  const auto mids = oracle::midpoints(data.window(), cells);
  const double cell = data.window().volume() / static_cast<double>(mids.size());
  std::vector<double> zq;
  for (const auto& m : mids) zq.push_back(oracle::field_value(rep.field, m)[0]);
  std::vector<double> ze;
  for (std::size_t k = 0; k < rep.pattern.size(); ++k) ze.push_back(oracle::field_value(rep.field, rep.pattern.point(k))[0]);
  const double K = static_cast<double>(ze.size());

  // Mixture weights over (theta, gamma); only ell = gamma^theta matters for w.
  std::vector<double> ells, mix;
  const int nt = 40, ng = 200;
  for (int i = 0; i < nt; ++i) {
    const double th = (i + 0.5) / nt;
    const double pt = std::pow(th, hyper.a_theta - 1.0) * std::pow(1.0 - th, hyper.b_theta - 1.0);
    for (int j = 0; j < ng; ++j) {
      // Equal-probability nodes of Gamma(a_gamma, b_gamma).
      const double u = (j + 0.5) / ng;
      const double g = boost::math::gamma_p_inv(hyper.a_gamma, u) / hyper.b_gamma;
      ells.push_back(std::pow(g, th));
      mix.push_back(pt);
    }
  }
  const double nug = 1e-10;
  std::vector<double> corr(ells.size()), logdet(ells.size());
  for (std::size_t k = 0; k < ells.size(); ++k) {
    corr[k] = std::exp(-ells[k]);
    logdet[k] = std::log((1.0 + nug) * (1.0 + nug) - corr[k] * corr[k]);
  }

  const int nw = 281;
  const double wmax = 5.0;
  const double dw = 2.0 * wmax / (nw - 1);
  // rho* integrates out in closed form: Gamma(K + a_rho, b_rho + S).
  const double shape = K + hyper.a_rho;
  std::vector<double> num(zs.size(), 0.0);
  double den = 0.0;
  for (int a = 0; a < nw; ++a) {
    const double w1 = -wmax + a * dw;
    for (int b = 0; b < nw; ++b) {
      const double w2 = -wmax + b * dw;
      double prior = 0.0;
      for (std::size_t k = 0; k < ells.size(); ++k) {
        const double det = std::exp(logdet[k]);
        const double quad = ((1.0 + nug) * (w1 * w1 + w2 * w2) - 2.0 * corr[k] * w1 * w2) / det;
        prior += mix[k] * std::exp(-0.5 * quad - 0.5 * logdet[k]);
      }
      if (prior == 0.0) continue;
      double S = 0.0;
      for (double z : zq) S += cell * oracle::logistic((1.0 - z) * w1 + z * w2);
      double ev = 0.0;
      for (double z : ze) ev += std::log(oracle::logistic((1.0 - z) * w1 + z * w2));
      const double rate = hyper.b_rho + S;
      const double weight = prior * std::exp(ev - shape * std::log(rate));
      den += weight;
      for (std::size_t i = 0; i < zs.size(); ++i) {
        num[i] += weight * shape / rate * oracle::logistic((1.0 - zs[i]) * w1 + zs[i] * w2);
      }
    }
  }
  for (auto& v : num) v /= den;
  return num;
}

// 8: oracle equivalences.
Outcome criterion8() {
  Outcome o;
  const auto window = Window::centered_unit_square();
  {
    // Log-likelihood against a term-by-term evaluation.
    double worst = 0.0;
    std::mt19937_64 gen(81);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    std::normal_distribution<double> nd(0.0, 1.5);
    const auto basis = build_basis({1, 5, 0.0});
    ArdKernel kernel(basis);
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<Replicate> reps;
      for (int i = 0; i < 2; ++i) {
        PointPattern p(window);
        const int k = static_cast<int>(gen() % 4);
        for (int e = 0; e < k; ++e) p.add(std::vector<double>{unif(gen), unif(gen)});
        reps.push_back({p, gaussianize(sample_se_field(window, 15, 0.05, gen()))});
      }
      const Dataset data(std::move(reps));
      const std::size_t cells = 12;
      LikelihoodContext ctx(data, build_quadrature(window, cells), basis);
      Eigen::VectorXd w(5);
      for (auto& x : w) x = nd(gen);
      const double rho_star = 0.3 + std::abs(nd(gen));
      LatentState s(rho_star, {0.5}, {1.0}, w, kernel);
      const std::vector<double> wv(w.data(), w.data() + 5);
      worst = std::max(worst, std::abs(log_likelihood(ctx, s) - oracle::loglik_1d(data, cells, wv, rho_star)));
    }
    o.add("loglik", worst < 1e-10, "loglik max abs diff " + fmt(worst, 3) + " (< 1e-10)");
  }
  {
    double worst = 0.0;
    std::mt19937_64 gen(82);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int used = 0;
    // Nodes of the bases used in practice; ell spans the prior bulk.
    const std::vector<BasisSpec> specs{{1, 3, 0.0}, {1, 5, 0.0}, {1, 6, 0.0}, {2, 3, 0.0}, {2, 4, 0.0}};
    for (int trial = 0; trial < 200; ++trial) {
      const auto basis = build_basis(specs[trial % specs.size()]);
      const std::size_t d = basis.dim();
      const std::size_t V = basis.size();
      std::vector<double> ell(d);
      for (auto& l : ell) l = 1.0 + 9.0 * unif(gen);
      ArdKernel k(basis);
      CholeskyFactor f;
      if (!k.try_factorize(ell, f) || f.jitter > 1.5e-10) continue;
      Eigen::VectorXd w(static_cast<Eigen::Index>(V));
      for (auto& x : w) x = 4.0 * unif(gen) - 2.0;
      const double expect = oracle::log_gaussian_dense(oracle::ard_matrix(basis.nodes(), d, ell, 1e-10), w);
      worst = std::max(worst, std::abs(log_prior_w(w, f) - expect) / std::max(1.0, std::abs(expect)));
      ++used;
    }
    o.add("log_prior_w", used >= 100 && worst < 1e-8, "log_prior_w max rel diff " + fmt(worst, 3) + " over " + std::to_string(used) + " matrices (< 1e-8)");
  }
  {
    // Toy joint posterior: n = 1, K = 2, V = 2.
    PointPattern p(window);
    p.add(std::vector<double>{0.2, 0.1});
    p.add(std::vector<double>{0.35, -0.2});
    const Dataset data({Replicate{p, linear_field()}});
    const HyperParams hyper;
    const std::size_t cells = 10;
    const std::vector<double> zs{0.2, 0.5, 0.9};
    const auto exact = brute_force_posterior(data, cells, hyper, zs);

    SamplerConfig cfg;
    cfg.iterations = 400000;
    cfg.burn_in = 20000;
    cfg.thin = 10;
    cfg.tune_zeta = true;
    cfg.zeta = 0.25;
    cfg.seed = 83;
    const auto basis = build_basis({1, 2, 0.0});
    const auto trace = run_chain(data, basis, build_quadrature(window, cells), hyper, cfg);
    double worst = 0.0;
    std::string detail = "toy posterior mean (sampler/grid):";
    const auto states = post_burn_in_states(trace, cfg.burn_in);
    for (std::size_t i = 0; i < zs.size(); ++i) {
      double m = 0.0;
      for (const auto* s : states) m += snapshot_intensity(*s, basis, std::vector<double>{zs[i]});
      m /= static_cast<double>(states.size());
      worst = std::max(worst, std::abs(m - exact[i]) / exact[i]);
      detail += " " + fmt(m, 4) + "/" + fmt(exact[i], 4);
    }
    o.add("toy posterior", worst < 0.10, detail + ", max rel " + fmt(worst, 3) + " (< 0.1)");
  }
  {
    // d_Z empirical over stationary uniform fields vs the uniform-mode value.
    // 25 quadrature cells on a 51-node field grid put every midpoint on a node.
    FieldSimulator sim(window, FieldConfig{51, {kFineFieldLengthscale}});
    Rng rng(derive_seed(8, 4));
    std::vector<CovariateField> fields;
    for (int i = 0; i < 500; ++i) fields.push_back(sim.sample(rng));
    const auto t1 = TruthSpec::from_name("skew_normal_1d");
    const auto t2 = TruthSpec::from_name("exp_decay_1d");
    const IntensityFn r1 = [&](std::span<const double> z) { return truth_intensity(t1, z); };
    const IntensityFn r2 = [&](std::span<const double> z) { return truth_intensity(t2, z); };
    const auto emp = dz_distance_empirical(r1, r2, fields, build_quadrature(window, 25));
    const EvalGrid fine(1, 20001);
    const double uni = dz_distance_uniform(truth_on_grid(t1, fine), truth_on_grid(t2, fine), window.volume());
    const double gap = std::abs(emp.squared - uni * uni);
    o.add("dz", gap < 3.0 * emp.squared_se,
          "d_Z^2 empirical " + fmt(emp.squared, 5) + " vs uniform " + fmt(uni * uni, 5) + ", gap " + fmt(gap, 3) +
              " (< 3 SE = " + fmt(3.0 * emp.squared_se, 3) + ")");
  }
  {
    const std::vector<std::tuple<std::string, double, std::string>> norms{
        {"plateau_1d", 2.29, ""},
        {"exp_decay_1d", 6.09, ""},
        {"skew_basin_2d", 9.62, "the stated formula yields a different norm"},
        {"skew_peaks_2d", 21.36, "the stated formula yields a different norm"}};
    for (const auto& [name, target, known] : norms) {
      const auto t = TruthSpec::from_name(name);
      const double v = truth_l2_norm(t, EvalGrid::defaults(t.dim()));
      const double rel = std::abs(v - target) / target;
      o.add("norm " + name, rel <= 0.01, name + " norm " + fmt(v, 4) + " vs " + fmt(target, 4), known);
    }
  }
  return o;
}

// 9: determinism across runs and thread counts.
Outcome criterion9(const fs::path& scratch) {
  Outcome o;
  auto cfg = preset("smoke");
  cfg.sample_sizes = {20, 40};
  cfg.replications = 2;
  cfg.sampler.iterations = 400;
  cfg.sampler.burn_in = 100;
  cfg.seed = 99;
  const auto run = [&](const std::string& tag, std::size_t threads) {
    auto c = cfg;
    c.output.dir = (scratch / tag).string();
    fs::remove_all(c.output.dir);
    ThreadPool pool(threads);
    run_experiment(c, true, &pool);
    return fs::path(c.output.dir);
  };
  const auto a = run("a", 1);
  const auto b = run("b", 1);
  const auto c = run("c", 4);
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename().string();
    const bool relevant = name.rfind("trace_", 0) == 0 || name == "summary.csv" || name.rfind("estimate_", 0) == 0 ||
                          name.rfind("w_", 0) == 0;
    if (!relevant) continue;
    const auto text = read_text_file(entry.path());
    for (const auto& other : {b, c}) {
      ++compared;
      if (!fs::exists(other / name) || read_text_file(other / name) != text) ++differing;
    }
  }
  o.add("bytes", compared >= 20 && differing == 0,
        std::to_string(compared) + " file comparisons (runs x2, threads 1 vs 4), " + std::to_string(differing) +
            " differ");
  for (const auto& d : {a, b, c}) fs::remove_all(d);
  return o;
}

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coxgp acceptance suite"};
  std::vector<int> selected{1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::size_t threads = 1;
  std::string scratch = (fs::temp_directory_path() / "coxgp_acceptance").string();
  app.add_option("--criteria", selected, "Criteria to run")->delimiter(',');
  app.add_option("--threads", threads, "Worker threads for experiment criteria")->check(CLI::PositiveNumber);
  app.add_option("--scratch", scratch, "Directory for temporary outputs");
  CLI11_PARSE(app, argc, argv);

  ThreadPool pool(threads);
  const std::vector<Criterion> all{
      {1, "conjugate rho* block", 10, criterion1},
      {2, "pCN prior invariance", 120, criterion2},
      {3, "theta/ell 1-d target matching", 300, criterion3},
      {4, "thinning calibration", 60, [&] { return criterion4(pool); }},
      {5, "desk-scale 1-d table slice", 45 * 60, [&] { return criterion5(pool); }},
      {6, "contraction trend", 2 * 3600, [&] { return criterion6(pool); }},
      {7, "anisotropy adaptation", 3600, [&] { return criterion7(pool); }},
      {8, "oracle equivalences", 300, criterion8},
      {9, "determinism", 300, [&] { return criterion9(scratch); }},
  };

  int hard_failures = 0;
  for (const auto& c : all) {
    if (std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.add("exception", false, std::string("error: ") + e.what());
    }
    const double secs = seconds_since(t0);
    out.add("runtime", secs <= c.budget_seconds, "runtime " + fmt(secs, 3) + " s (budget " + fmt(c.budget_seconds) + " s)");

    bool pass = true, waived_only = true;
    std::string details, known;
    for (const auto& ch : out.checks) {
      details += (details.empty() ? "" : "; ") + ch.detail + (ch.pass ? "" : " [FAIL]");
      if (!ch.pass) {
        pass = false;
        if (ch.known_unattainable.empty()) {
          waived_only = false;
        } else {
          known += (known.empty() ? "" : "; ") + ch.name + ": " + ch.known_unattainable;
        }
      }
    }
    std::cout << "CRITERION " << c.id << " " << (pass ? "PASS" : "FAIL") << " " << c.title << ": " << details;
    if (!pass && waived_only) std::cout << " (known unattainable: " << known << ")";
    std::cout << std::endl;
    if (!pass && !waived_only) ++hard_failures;
  }
  return hard_failures == 0 ? 0 : 1;
}
