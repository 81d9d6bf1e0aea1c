#include "coxgp/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "coxgp/error.hpp"
#include "coxgp/io.hpp"
#include "coxgp/parallel.hpp"
#include "coxgp/plots.hpp"

namespace coxgp {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDataStream = 0x64617461;
constexpr std::uint64_t kChainStream = 0x636861696e;

struct Job {
  std::size_t n;
  std::size_t replication;
};

std::string job_label(std::size_t n, std::size_t r) { return "n" + std::to_string(n) + "_r" + std::to_string(r); }

void write_artifacts(const ExperimentConfig& config, const std::string& label, const Dataset& dataset,
                     const FitResult& fit, const std::vector<double>& truth, std::vector<std::string>& warnings) {
  const fs::path dir(config.output.dir);
  std::ostringstream s;
  write_trace_csv(s, fit.trace);
  write_text_file(dir / ("trace_" + label + ".csv"), s.str());
  if (config.output.w_format == WFormat::Csv) {
    std::ostringstream w;
    write_w_csv(w, fit.trace);
    write_text_file(dir / ("w_" + label + ".csv"), w.str());
  } else if (config.output.w_format == WFormat::Binary) {
    std::ostringstream w(std::ios::binary);
    write_w_binary(w, fit.trace);
    write_text_file(dir / ("w_" + label + ".bin"), w.str());
  }
  std::ostringstream e;
  write_estimate_csv(e, fit.estimate);
  write_text_file(dir / ("estimate_" + label + ".csv"), e.str());
  if (fit.baseline) {
    std::ostringstream k;
    write_kernel_csv(k, *fit.baseline);
    write_text_file(dir / ("kernel_" + label + ".csv"), k.str());
  }

  // Plug-in spatial intensity on the first replicate, at the quadrature nodes.
  if (!dataset.empty()) {
    const QuadratureRule q = config_quadrature(config);
    const std::vector<double> values =
        plugin_spatial_intensity(fit.estimate.grid, fit.estimate.mean, dataset[0].field, q.nodes);
    std::ostringstream sp;
    write_spatial_csv(sp, q.nodes, q.dim(), values);
    write_text_file(dir / ("spatial_" + label + ".csv"), sp.str());
  }

  if (!config.output.plots) return;
  const std::size_t d = fit.estimate.grid.dim();
  if (d == 1) {
    std::vector<double> baseline;
    if (fit.baseline) baseline = fit.baseline->values;
    write_text_file(dir / ("estimate_" + label + ".svg"),
                    estimate_plot_svg(fit.estimate, truth, baseline, "posterior mean " + label));
  } else if (d == 2) {
    write_text_file(dir / ("estimate_" + label + ".svg"),
                    heatmap_svg(fit.estimate.grid, fit.estimate.mean, "posterior mean " + label));
  }
  if (auto svg = trace_plot_svg(fit.trace.sweeps, "trace " + label)) {
    write_text_file(dir / ("trace_" + label + ".svg"), *svg);
  } else {
    warnings.push_back(label + ": empty trace, no trace plot written");
  }
}

ReplicationResult run_job(const ExperimentConfig& config, const Job& job, const std::optional<Dataset>& external,
                          bool write_outputs, ThreadPool* pool, std::vector<std::string>& warnings) {
  ReplicationResult res;
  res.n = job.n;
  res.replication = job.replication;
  res.label = job_label(job.n, job.replication);
  try {
    const Dataset dataset =
        external ? *external
                 : simulate_dataset(job.n, config.window, config.fields, config.truth,
                                    data_seed(config.seed, job.n, job.replication), pool);
    res.events = dataset.total_events();
    const FitResult fit = fit_dataset(dataset, config, chain_seed(config.seed, job.n, job.replication), pool);
    const std::size_t burn = fit.trace.burn_in;
    res.ell_mean = fit.trace.sweeps.size() > burn + 1 ? posterior_mean_ell(fit.trace, burn)
                                                      : std::vector<double>(fit.trace.dim, 0.0);
    res.pcn_rate = fit.trace.post_burn_in.pcn_rate();
    std::vector<double> truth;
    if (config.scenario == Scenario::Simulate) {
      res.has_truth = true;
      const EvalGrid& grid = fit.estimate.grid;
      truth = truth_on_grid(config.truth, grid);
      res.posterior = l2_error(fit.estimate.mean, config.truth, grid);
      res.posterior_dz = dz_distance_uniform(fit.estimate.mean, truth, config.window.volume());
      res.coverage = band_coverage(fit.estimate, config.truth);
      if (fit.baseline) {
        res.has_baseline = true;
        res.baseline = l2_error(fit.baseline->values, config.truth, grid);
        res.baseline_dz = dz_distance_uniform(fit.baseline->values, truth, config.window.volume());
      }
    }
    if (write_outputs) write_artifacts(config, res.label, dataset, fit, truth, warnings);
    res.ok = true;
  } catch (const std::exception& e) {
    res.ok = false;
    res.error = e.what();
  }
  return res;
}

}  // namespace

InterpolationBasis config_basis(const ExperimentConfig& config) {
  BasisSpec spec = config.basis;
  spec.dim = config.covariate_dim();
  return build_basis(spec);
}

QuadratureRule config_quadrature(const ExperimentConfig& config) {
  return build_quadrature(config.window, config.quadrature_cells);
}

std::uint64_t data_seed(std::uint64_t seed, std::size_t n, std::size_t replication) {
  return derive_seed(derive_seed(seed, kDataStream), n, replication);
}

std::uint64_t chain_seed(std::uint64_t seed, std::size_t n, std::size_t replication) {
  return derive_seed(derive_seed(seed, kChainStream), n, replication);
}

FitResult fit_dataset(const Dataset& dataset, const ExperimentConfig& config, std::uint64_t seed, ThreadPool* pool) {
  require(dataset.covariate_dim() == config.covariate_dim(), "fit: dataset and config covariate dimensions differ");
  const InterpolationBasis basis = config_basis(config);
  const QuadratureRule quadrature = config_quadrature(config);
  require(quadrature.window == dataset.window(), "fit: dataset window differs from the configured window");
  SamplerConfig sampler = config.sampler;
  sampler.seed = seed;
  const EvalGrid grid = config.eval_grid();
  ChainTrace trace = run_chain(dataset, basis, quadrature, config.hyper, sampler, pool);
  IntensityEstimate estimate = summarize_posterior(trace, trace.burn_in, basis, grid, config.level, pool);
  std::optional<KernelEstimate> baseline;
  if (config.baseline && config.covariate_dim() <= 2) {
    baseline = kernel_estimate_average(dataset, quadrature, grid, config.baseline_variant, pool,
                                       config.baseline_bandwidth);
  }
  return FitResult{std::move(trace), std::move(estimate), std::move(baseline)};
}

const SummaryRow* ExperimentReport::row(const std::string& estimator, const std::string& metric) const {
  for (const auto& r : summary) {
    if (r.estimator == estimator && r.metric == metric) return &r;
  }
  return nullptr;
}

std::vector<SummaryRow> summarize_results(const std::vector<ReplicationResult>& results,
                                          const std::vector<std::size_t>& sample_sizes, std::size_t dim) {
  using Getter = double (*)(const ReplicationResult&, std::size_t);
  struct Metric {
    std::string estimator;
    std::string metric;
    bool needs_truth;
    bool needs_baseline;
    std::size_t arg;
    Getter get;
  };
  std::vector<Metric> metrics{
      {"posterior_mean", "abs_l2", true, false, 0, [](const ReplicationResult& r, std::size_t) { return r.posterior.absolute; }},
      {"posterior_mean", "rel_l2", true, false, 0, [](const ReplicationResult& r, std::size_t) { return r.posterior.relative; }},
      {"posterior_mean", "dz", true, false, 0, [](const ReplicationResult& r, std::size_t) { return r.posterior_dz; }},
      {"posterior_mean", "coverage", true, false, 0, [](const ReplicationResult& r, std::size_t) { return r.coverage; }},
      {"posterior_mean", "pcn_acceptance", false, false, 0, [](const ReplicationResult& r, std::size_t) { return r.pcn_rate; }},
  };
  for (std::size_t j = 0; j < dim; ++j) {
    metrics.push_back({"posterior_mean", "ell_" + std::to_string(j + 1), false, false, j,
                       [](const ReplicationResult& r, std::size_t k) { return r.ell_mean.at(k); }});
  }
  metrics.push_back({"kernel", "abs_l2", true, true, 0, [](const ReplicationResult& r, std::size_t) { return r.baseline.absolute; }});
  metrics.push_back({"kernel", "rel_l2", true, true, 0, [](const ReplicationResult& r, std::size_t) { return r.baseline.relative; }});
  metrics.push_back({"kernel", "dz", true, true, 0, [](const ReplicationResult& r, std::size_t) { return r.baseline_dz; }});

  std::vector<SummaryRow> rows;
  for (const auto& m : metrics) {
    SummaryRow row{m.estimator, m.metric, {}, {}, {}};
    bool any = false;
    for (std::size_t n : sample_sizes) {
      std::vector<double> v;
      for (const auto& r : results) {
        if (r.n != n || !r.ok) continue;
        if (m.needs_truth && !r.has_truth) continue;
        if (m.needs_baseline && !r.has_baseline) continue;
        v.push_back(m.get(r, m.arg));
      }
      const double nan = std::numeric_limits<double>::quiet_NaN();
      double mean = nan;
      double sd = nan;
      if (!v.empty()) {
        mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        if (v.size() > 1) {
          double ss = 0.0;
          for (double x : v) ss += (x - mean) * (x - mean);
          sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
        }
        any = true;
      }
      row.mean.push_back(mean);
      row.sd.push_back(sd);
      row.count.push_back(v.size());
    }
    if (any) rows.push_back(std::move(row));
  }
  return rows;
}

std::string summary_csv(const ExperimentReport& report) {
  std::ostringstream o;
  o << "estimator,metric";
  for (std::size_t n : report.sample_sizes) o << ",n" << n << "_mean,n" << n << "_sd,n" << n << "_count";
  o << '\n';
  for (const auto& r : report.summary) {
    o << r.estimator << ',' << r.metric;
    for (std::size_t k = 0; k < r.mean.size(); ++k) {
      o << ',' << format_double(r.mean[k]) << ',' << format_double(r.sd[k]) << ',' << r.count[k];
    }
    o << '\n';
  }
  return o.str();
}

ExperimentReport run_experiment(const ExperimentConfig& config, bool write_outputs, ThreadPool* pool) {
  config.validate();
  ExperimentReport report;
  std::optional<Dataset> external;
  std::vector<Job> jobs;
  if (config.scenario == Scenario::External) {
    external = load_dataset(config.external.points, config.external.raster, config.external.preprocess);
    require(external->covariate_dim() == config.covariate_dim(),
            "experiment: external covariates do not match the configured dimension");
    report.sample_sizes = {external->size()};
    jobs.push_back({external->size(), 0});
  } else {
    report.sample_sizes = config.sample_sizes;
    for (std::size_t n : config.sample_sizes) {
      for (std::size_t r = 0; r < config.replications; ++r) jobs.push_back({n, r});
    }
  }

  std::vector<ReplicationResult> results(jobs.size());
  std::vector<std::vector<std::string>> warnings(jobs.size());
  const bool across = pool && pool->threads() > 1 && jobs.size() > 1;
  if (across) {
    pool->parallel_for(jobs.size(), [&](std::size_t i) {
      results[i] = run_job(config, jobs[i], external, write_outputs, nullptr, warnings[i]);
    });
  } else {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      results[i] = run_job(config, jobs[i], external, write_outputs, pool, warnings[i]);
    }
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    for (auto& w : warnings[i]) report.warnings.push_back(std::move(w));
    if (!results[i].ok) report.warnings.push_back(results[i].label + ": failed: " + results[i].error);
  }
  report.results = std::move(results);
  report.summary = summarize_results(report.results, report.sample_sizes, config.covariate_dim());

  if (write_outputs) {
    const fs::path dir(config.output.dir);
    write_text_file(dir / "summary.csv", summary_csv(report));
    std::ostringstream rep;
    rep << "label,ok,events,error\n";
    for (const auto& r : report.results) {
      rep << r.label << ',' << (r.ok ? 1 : 0) << ',' << r.events << ',' << '"' << r.error << '"' << '\n';
    }
    write_text_file(dir / "replications.csv", rep.str());
    std::string warn;
    for (const auto& w : report.warnings) warn += w + "\n";
    write_text_file(dir / "warnings.txt", warn);
    write_text_file(dir / "config.json", config_to_json(config));
  }
  return report;
}

}  // namespace coxgp
