#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coxgp/geometry.hpp"
#include "coxgp/sampler.hpp"
#include "coxgp/summaries.hpp"

namespace coxgp {

// Standalone SVG documents. Output depends only on the inputs.

struct Series {
  std::string name;
  std::vector<double> y;
  std::string color;
  bool dashed = false;
};

struct BandSeries {
  std::string name;
  std::vector<double> lower;
  std::vector<double> upper;
  std::string color;
};

std::string line_plot_svg(std::span<const double> x, std::span<const Series> lines,
                          const std::optional<BandSeries>& band, const std::string& title);

/// 1-d posterior mean, credible band, truth and (optional) kernel baseline.
std::string estimate_plot_svg(const IntensityEstimate& estimate, std::span<const double> truth,
                              std::span<const double> baseline, const std::string& title);

/// 2-d grid values as a heatmap with a linear color scale and its range printed.
std::string heatmap_svg(const EvalGrid& grid, std::span<const double> values, const std::string& title);

/// Panels for rho*, each ell_j and the log-likelihood; nullopt when the
/// trace has no sweeps beyond the initial state.
std::optional<std::string> trace_plot_svg(std::span<const SweepRecord> sweeps, const std::string& title);

}  // namespace coxgp
