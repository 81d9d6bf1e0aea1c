#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "coxgp/cox_sim.hpp"
#include "coxgp/geometry.hpp"
#include "coxgp/kernel_baseline.hpp"
#include "coxgp/model.hpp"
#include "coxgp/random_field.hpp"
#include "coxgp/sampler.hpp"

namespace coxgp {

enum class Scenario { Simulate, External };
enum class WFormat { Csv, Binary, None };

struct ExternalData {
  std::string points;
  std::string raster;
  Preprocess preprocess = Preprocess::StandardizedNormalCdf;
};

struct OutputConfig {
  std::string dir = "out";
  WFormat w_format = WFormat::Csv;
  bool plots = true;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::Simulate;
  TruthSpec truth;
  FieldConfig fields;
  Window window = Window::centered_unit_square();
  std::vector<std::size_t> sample_sizes{50};
  std::size_t replications = 1;
  BasisSpec basis{1, 100, 0.0};
  std::size_t quadrature_cells = 50;
  HyperParams hyper;
  SamplerConfig sampler;
  double level = 0.95;
  /// Evaluation grid points per axis; 0 selects EvalGrid::defaults.
  std::size_t grid_points = 0;
  bool baseline = true;
  KernelVariant baseline_variant = KernelVariant::PlainAverage;
  BandwidthSource baseline_bandwidth = BandwidthSource::Events;
  ExternalData external;
  OutputConfig output;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  /// Covariate dimension implied by the scenario.
  std::size_t covariate_dim() const;
  EvalGrid eval_grid() const;
  void validate() const;
};

/// Named presets: paper-1d, paper-2d, desk-1d, desk-2d, smoke, wildfire-like.
std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

/// Parses a JSON document. An optional "preset" key selects the base that
/// the remaining keys override. Unknown keys are rejected.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string to_string(Preprocess mode);
Preprocess preprocess_from_string(const std::string& name);
std::string to_string(KernelVariant variant);
std::string to_string(BandwidthSource source);
BandwidthSource bandwidth_source_from_string(const std::string& name);
KernelVariant kernel_variant_from_string(const std::string& name);

}  // namespace coxgp
