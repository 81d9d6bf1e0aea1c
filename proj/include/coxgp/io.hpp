#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coxgp/cox_sim.hpp"
#include "coxgp/kernel_baseline.hpp"
#include "coxgp/random_field.hpp"
#include "coxgp/sampler.hpp"
#include "coxgp/summaries.hpp"

namespace coxgp {

/// Shortest text that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);
std::size_t parse_index(std::string_view text);
std::vector<std::string_view> split_csv_line(std::string_view line);

// Point patterns: header `replicate,x1,...,xD`, one event per row.
void write_points_csv(std::ostream& out, std::span<const PointPattern> patterns);
void write_points_csv(std::ostream& out, const Dataset& dataset);
/// Rows may come in any replicate order; every index must be < replicates.
std::vector<PointPattern> read_points_csv(std::istream& in, const Window& window, std::size_t replicates);

/// Covariate rasters on one shared grid. Header comment lines carry
/// `dim=d axis_k=<count> lower=<...> upper=<...> normalized=0|1`; rows are
/// `replicate,i1,...,iD,z1,...,zd` in row-major node order per replicate.
struct Raster {
  FieldGrid grid;
  std::size_t dim = 1;
  bool normalized = true;
  std::vector<RawField> fields;
};

void write_raster_csv(std::ostream& out, std::span<const RawField> fields, bool normalized);
void write_raster_csv(std::ostream& out, std::span<const CovariateField> fields);
Raster read_raster_csv(std::istream& in);

/// Normalized rasters are used as they are; others go through `mode`.
Dataset load_dataset(std::istream& points, std::istream& raster, Preprocess mode);
Dataset load_dataset(const std::filesystem::path& points, const std::filesystem::path& raster, Preprocess mode);
void save_dataset(const std::filesystem::path& points, const std::filesystem::path& raster, const Dataset& dataset);

// Chain traces: sweep,rho_star,theta_j,ell_j,loglik,theta_acc_j,ell_acc_j,pcn_acc,zeta.
void write_trace_csv(std::ostream& out, const ChainTrace& trace);
std::vector<SweepRecord> read_trace_csv(std::istream& in);

/// Long format sweep,node,value for every stored state.
void write_w_csv(std::ostream& out, const ChainTrace& trace);
/// Rebuilds states from a w table; rho*, theta and ell come from the matching sweep records.
std::vector<StateSnapshot> read_w_csv(std::istream& in, std::span<const SweepRecord> sweeps);

/// Binary dump: magic "COXGPW1\0", uint64 rows, uint64 cols, then per row
/// the sweep as uint64 followed by cols doubles (host byte order).
void write_w_binary(std::ostream& out, const ChainTrace& trace);
std::vector<StateSnapshot> read_w_binary(std::istream& in, std::span<const SweepRecord> sweeps);

/// Comment line with level and quantile method, then z_1..z_d,mean,lower,upper.
void write_estimate_csv(std::ostream& out, const IntensityEstimate& estimate);
/// z_1..z_d,value,supported.
void write_kernel_csv(std::ostream& out, const KernelEstimate& estimate);
/// x_1..x_D,value.
void write_spatial_csv(std::ostream& out, std::span<const double> xs, std::size_t spatial_dim,
                       std::span<const double> values);

/// Writes text to a file, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace coxgp
