#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coxgp/config.hpp"
#include "coxgp/cox_sim.hpp"
#include "coxgp/kernel_baseline.hpp"
#include "coxgp/sampler.hpp"
#include "coxgp/summaries.hpp"

namespace coxgp {

class ThreadPool;

/// Everything one posterior fit produces.
struct FitResult {
  ChainTrace trace;
  IntensityEstimate estimate;
  std::optional<KernelEstimate> baseline;
};

/// Builds basis and quadrature from the config, runs the chain with the
/// given seed, summarizes on the config's evaluation grid and, for d <= 2
/// with the baseline enabled, computes the kernel estimate.
FitResult fit_dataset(const Dataset& dataset, const ExperimentConfig& config, std::uint64_t seed,
                      ThreadPool* pool = nullptr);

InterpolationBasis config_basis(const ExperimentConfig& config);
QuadratureRule config_quadrature(const ExperimentConfig& config);

/// Seeds of replication r at sample size n.
std::uint64_t data_seed(std::uint64_t seed, std::size_t n, std::size_t replication);
std::uint64_t chain_seed(std::uint64_t seed, std::size_t n, std::size_t replication);

struct ReplicationResult {
  std::size_t n = 0;
  std::size_t replication = 0;
  std::string label;  // n<n>_r<replication>
  bool ok = false;
  std::string error;
  std::size_t events = 0;
  bool has_truth = false;
  L2Error posterior;
  double posterior_dz = 0.0;
  double coverage = 0.0;
  bool has_baseline = false;
  L2Error baseline;
  double baseline_dz = 0.0;
  std::vector<double> ell_mean;
  double pcn_rate = 0.0;
};

/// One row of the summary table: an estimator x metric pair with mean, sd
/// and count of successful replications per sample size.
struct SummaryRow {
  std::string estimator;
  std::string metric;
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<std::size_t> count;
};

struct ExperimentReport {
  std::vector<std::size_t> sample_sizes;
  std::vector<ReplicationResult> results;
  std::vector<SummaryRow> summary;
  std::vector<std::string> warnings;

  const SummaryRow* row(const std::string& estimator, const std::string& metric) const;
};

/// Header: estimator,metric then n<N>_mean,n<N>_sd,n<N>_count per sample size.
std::string summary_csv(const ExperimentReport& report);
std::vector<SummaryRow> summarize_results(const std::vector<ReplicationResult>& results,
                                          const std::vector<std::size_t>& sample_sizes, std::size_t dim);

/// Runs every (n, replication) pair. Errors abort only the affected
/// replication and are recorded. When write_outputs is set, artifacts go to
/// config.output.dir. The result depends only on the config.
ExperimentReport run_experiment(const ExperimentConfig& config, bool write_outputs, ThreadPool* pool = nullptr);

}  // namespace coxgp
