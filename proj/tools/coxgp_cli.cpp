// coxgp command line: simulate, fit, baseline, summarize, experiment, diagnostics.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coxgp/config.hpp"
#include "coxgp/error.hpp"
#include "coxgp/experiment.hpp"
#include "coxgp/io.hpp"
#include "coxgp/parallel.hpp"
#include "coxgp/plots.hpp"
#include "coxgp/summaries.hpp"

namespace fs = std::filesystem;
using namespace coxgp;

namespace {

struct Globals {
  std::string config;
  std::string preset;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  std::size_t threads = 0;
};

ExperimentConfig resolve(const Globals& g) {
  ExperimentConfig c;
  if (!g.config.empty()) {
    c = load_config(g.config);
  } else if (!g.preset.empty()) {
    c = preset(g.preset);
  } else {
    c = preset("smoke");
  }
  if (g.seed_set) c.seed = g.seed;
  if (!g.out.empty()) c.output.dir = g.out;
  if (g.threads > 0) c.threads = g.threads;
  c.validate();
  return c;
}

Dataset load_inputs(const std::string& points, const std::string& raster, const ExperimentConfig& c,
                    const std::string& preprocess) {
  const Preprocess mode = preprocess.empty() ? c.external.preprocess : preprocess_from_string(preprocess);
  return load_dataset(points, raster, mode);
}

void print_rates(const ChainTrace& t) {
  std::printf("pcn acceptance (post burn-in): %.3f\n", t.post_burn_in.pcn_rate());
  for (std::size_t j = 0; j < t.dim; ++j) {
    std::printf("theta_%zu acceptance: %.3f  ell_%zu acceptance: %.3f\n", j + 1, t.post_burn_in.theta_rate(j), j + 1,
                t.post_burn_in.ell_rate(j));
  }
  std::printf("final zeta: %.4g\n", t.final_zeta);
}

int cmd_simulate(const Globals& g, std::size_t n) {
  const ExperimentConfig c = resolve(g);
  require(c.scenario == Scenario::Simulate, "simulate: config scenario must be 'simulate'");
  if (n == 0) n = c.sample_sizes.front();
  const Dataset d = simulate_dataset(n, c.window, c.fields, c.truth, data_seed(c.seed, n, 0));
  const fs::path dir(c.output.dir);
  save_dataset(dir / "points.csv", dir / "raster.csv", d);
  std::printf("simulated %zu replicates, %zu events -> %s\n", d.size(), d.total_events(), dir.string().c_str());
  return 0;
}

int cmd_fit(const Globals& g, const std::string& points, const std::string& raster, const std::string& preprocess) {
  const ExperimentConfig c = resolve(g);
  ThreadPool pool(c.threads);
  const Dataset d = load_inputs(points, raster, c, preprocess);
  const FitResult fit = fit_dataset(d, c, chain_seed(c.seed, d.size(), 0), &pool);
  const fs::path dir(c.output.dir);
  std::ostringstream s;
  write_trace_csv(s, fit.trace);
  write_text_file(dir / "trace.csv", s.str());
  if (c.output.w_format == WFormat::Csv) {
    std::ostringstream w;
    write_w_csv(w, fit.trace);
    write_text_file(dir / "w.csv", w.str());
  } else if (c.output.w_format == WFormat::Binary) {
    std::ostringstream w(std::ios::binary);
    write_w_binary(w, fit.trace);
    write_text_file(dir / "w.bin", w.str());
  }
  std::ostringstream e;
  write_estimate_csv(e, fit.estimate);
  write_text_file(dir / "estimate.csv", e.str());
  if (fit.baseline) {
    std::ostringstream k;
    write_kernel_csv(k, *fit.baseline);
    write_text_file(dir / "kernel.csv", k.str());
  }
  if (c.output.plots) {
    if (fit.estimate.grid.dim() == 1) {
      std::vector<double> base;
      if (fit.baseline) base = fit.baseline->values;
      write_text_file(dir / "estimate.svg", estimate_plot_svg(fit.estimate, {}, base, "posterior mean"));
    } else if (fit.estimate.grid.dim() == 2) {
      write_text_file(dir / "estimate.svg", heatmap_svg(fit.estimate.grid, fit.estimate.mean, "posterior mean"));
    }
    if (auto svg = trace_plot_svg(fit.trace.sweeps, "trace")) {
      write_text_file(dir / "trace.svg", *svg);
    } else {
      std::fprintf(stderr, "warning: empty trace, no trace plot written\n");
    }
  }
  print_rates(fit.trace);
  return 0;
}

int cmd_baseline(const Globals& g, const std::string& points, const std::string& raster, const std::string& preprocess) {
  const ExperimentConfig c = resolve(g);
  ThreadPool pool(c.threads);
  const Dataset d = load_inputs(points, raster, c, preprocess);
  const KernelEstimate k =
      kernel_estimate_average(d, config_quadrature(c), c.eval_grid(), c.baseline_variant, &pool,
                              c.baseline_bandwidth);
  std::ostringstream s;
  write_kernel_csv(s, k);
  write_text_file(fs::path(c.output.dir) / "kernel.csv", s.str());
  if (c.scenario == Scenario::Simulate && c.truth.dim() == c.covariate_dim()) {
    const L2Error e = l2_error(k.values, c.truth, c.eval_grid());
    std::printf("kernel L2 error vs %s: %.5g (relative %.5g)\n", c.truth.name().c_str(), e.absolute, e.relative);
  }
  return 0;
}

int cmd_summarize(const Globals& g, const std::string& trace_path, const std::string& w_path, bool with_truth) {
  const ExperimentConfig c = resolve(g);
  std::ifstream tin(trace_path);
  if (!tin) throw Error("cannot open " + trace_path);
  const std::vector<SweepRecord> sweeps = read_trace_csv(tin);
  std::ifstream win(w_path, std::ios::binary);
  if (!win) throw Error("cannot open " + w_path);
  ChainTrace trace;
  trace.dim = c.covariate_dim();
  trace.burn_in = c.sampler.burn_in;
  trace.sweeps = sweeps;
  trace.states = fs::path(w_path).extension() == ".bin" ? read_w_binary(win, sweeps) : read_w_csv(win, sweeps);
  const InterpolationBasis basis = config_basis(c);
  trace.basis_size = basis.size();
  const IntensityEstimate est = summarize_posterior(trace, trace.burn_in, basis, c.eval_grid(), c.level);
  std::ostringstream e;
  write_estimate_csv(e, est);
  write_text_file(fs::path(c.output.dir) / "estimate.csv", e.str());
  std::printf("%zu post burn-in states summarized\n", est.samples);
  if (with_truth) {
    const L2Error err = l2_error(est.mean, c.truth, est.grid);
    std::printf("L2 error vs %s: %.5g (relative %.5g), band coverage %.3f\n", c.truth.name().c_str(), err.absolute,
                err.relative, band_coverage(est, c.truth));
  }
  return 0;
}

int cmd_experiment(const Globals& g) {
  const ExperimentConfig c = resolve(g);
  ThreadPool pool(c.threads);
  const ExperimentReport report = run_experiment(c, true, &pool);
  std::fputs(summary_csv(report).c_str(), stdout);
  for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return 0;
}

int cmd_diagnostics(const Globals& g, const std::string& trace_path, std::size_t burn_in) {
  std::ifstream in(trace_path);
  if (!in) throw Error("cannot open " + trace_path);
  const std::vector<SweepRecord> sweeps = read_trace_csv(in);
  const fs::path out = g.out.empty() ? fs::path(".") : fs::path(g.out);
  if (sweeps.size() < 2) {
    std::fprintf(stderr, "warning: empty trace, no trace plot written\n");
    return 0;
  }
  const std::size_t d = sweeps.front().ell.size();
  std::vector<double> theta(d, 0.0), ell(d, 0.0), ell_mean(d, 0.0);
  double pcn = 0.0;
  std::size_t count = 0;
  for (const auto& r : sweeps) {
    if (r.sweep <= burn_in) continue;
    ++count;
    pcn += r.pcn_accepted;
    for (std::size_t j = 0; j < d; ++j) {
      theta[j] += r.theta_accepted[j];
      ell[j] += r.ell_accepted[j];
      ell_mean[j] += r.ell[j];
    }
  }
  if (count == 0) throw Error("diagnostics: no sweeps after burn-in");
  const double m = static_cast<double>(count);
  std::printf("sweeps after burn-in: %zu\npcn accepted per sweep: %.3f\n", count, pcn / m);
  for (std::size_t j = 0; j < d; ++j) {
    std::printf("theta_%zu acceptance %.3f, ell_%zu acceptance %.3f, posterior mean ell_%zu %.5g\n", j + 1,
                theta[j] / m, j + 1, ell[j] / m, j + 1, ell_mean[j] / m);
  }
  if (d == 2) std::printf("ell_1 / ell_2 = %.4g\n", ell_mean[0] / ell_mean[1]);
  if (auto svg = trace_plot_svg(sweeps, "trace")) write_text_file(out / "trace.svg", *svg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian covariate-driven intensity estimation for replicated point patterns"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON experiment config");
  app.add_option("--preset", g.preset, "Named preset used when no config file is given");
  app.add_option_function<std::uint64_t>(
      "--seed", [&](const std::uint64_t& s) { g.seed = s, g.seed_set = true; }, "Master seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads");

  std::size_t n = 0;
  auto* sim = app.add_subcommand("simulate", "Simulate covariate rasters and point patterns");
  sim->add_option("--n", n, "Number of replicates (default: first configured sample size)");

  std::string points, raster, preprocess;
  auto* fit = app.add_subcommand("fit", "Run the sampler on a dataset");
  for (auto* sub : {fit, app.add_subcommand("baseline", "Averaged ratio-form kernel estimate")}) {
    sub->add_option("--points", points, "Point-pattern CSV")->required();
    sub->add_option("--raster", raster, "Covariate raster CSV")->required();
    sub->add_option("--preprocess", preprocess, "normal_cdf | standardized_normal_cdf | empirical_cdf | none");
  }
  auto* base = app.get_subcommand("baseline");

  std::string trace, w;
  bool with_truth = false;
  auto* summ = app.add_subcommand("summarize", "Posterior mean and band from a stored trace");
  summ->add_option("--trace", trace, "Trace CSV")->required();
  summ->add_option("--w", w, "w snapshots (.csv or .bin)")->required();
  summ->add_flag("--truth", with_truth, "Report L2 error against the configured truth");

  auto* exp = app.add_subcommand("experiment", "Replicated simulation study");

  std::size_t burn_in = 0;
  auto* diag = app.add_subcommand("diagnostics", "Acceptance rates and trace plots");
  diag->add_option("--trace", trace, "Trace CSV")->required();
  diag->add_option("--burn-in", burn_in, "Sweeps to discard");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return cmd_simulate(g, n);
    if (*fit) return cmd_fit(g, points, raster, preprocess);
    if (*base) return cmd_baseline(g, points, raster, preprocess);
    if (*summ) return cmd_summarize(g, trace, w, with_truth);
    if (*exp) return cmd_experiment(g);
    if (*diag) return cmd_diagnostics(g, trace, burn_in);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
