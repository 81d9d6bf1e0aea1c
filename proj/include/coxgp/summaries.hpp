#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coxgp/cox_sim.hpp"
#include "coxgp/geometry.hpp"
#include "coxgp/sampler.hpp"

namespace coxgp {

class ThreadPool;

/// Posterior summary of rho on an evaluation grid.
struct IntensityEstimate {
  EvalGrid grid;
  std::vector<double> mean;
  std::vector<double> lower;
  std::vector<double> upper;
  double level = 0.95;
  std::size_t samples = 0;
};

/// Quantile convention of the credible bands (linear interpolation of order statistics).
inline constexpr const char* kQuantileMethod = "linear";

/// Snapshots with sweep > burn_in.
std::vector<const StateSnapshot*> post_burn_in_states(const ChainTrace& trace, std::size_t burn_in);

/// rho* sigma(w(z)) of a stored state.
double snapshot_intensity(const StateSnapshot& state, const InterpolationBasis& basis, std::span<const double> z);

std::vector<double> posterior_mean(const ChainTrace& trace, std::size_t burn_in, const InterpolationBasis& basis,
                                   const EvalGrid& grid);

struct Band {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Pointwise empirical quantiles at (1 - level) / 2 and (1 + level) / 2.
Band credible_band(const ChainTrace& trace, std::size_t burn_in, const InterpolationBasis& basis,
                   const EvalGrid& grid, double level);

/// Mean and band in one pass over the states.
IntensityEstimate summarize_posterior(const ChainTrace& trace, std::size_t burn_in, const InterpolationBasis& basis,
                                      const EvalGrid& grid, double level, ThreadPool* pool = nullptr);

/// Linearly interpolated quantile of sorted values.
double sorted_quantile(std::span<const double> sorted, double p);

struct L2Error {
  double absolute = 0.0;
  double relative = 0.0;
};

/// Grid-mean L2 distance to the truth over [0,1]^d, and its ratio to the
/// truth's norm on the same grid.
L2Error l2_error(std::span<const double> values, const TruthSpec& truth, const EvalGrid& grid);

double truth_l2_norm(const TruthSpec& truth, const EvalGrid& grid);

std::vector<double> truth_on_grid(const TruthSpec& truth, const EvalGrid& grid);

/// sqrt(vol(W)) * || sqrt(rho1) - sqrt(rho2) ||_{L2([0,1]^d)} by grid mean.
double dz_distance_uniform(std::span<const double> rho1, std::span<const double> rho2, double window_volume);

struct DzEstimate {
  double distance = 0.0;
  /// Monte Carlo mean of int_W (sqrt rho1(Z) - sqrt rho2(Z))^2 dx and its standard error.
  double squared = 0.0;
  double squared_se = 0.0;
};

/// Monte Carlo d_Z over covariate fields, integrating over the window with the quadrature rule.
DzEstimate dz_distance_empirical(const IntensityFn& rho1, const IntensityFn& rho2,
                                 std::span<const CovariateField> fields, const QuadratureRule& quadrature);

/// Multilinear interpolation of grid values at z in [0,1]^d.
double interpolate_on_grid(const EvalGrid& grid, std::span<const double> values, std::span<const double> z);

/// value(x) = estimate(Z(x)) at each spatial point (flattened, D per point).
std::vector<double> plugin_spatial_intensity(const EvalGrid& grid, std::span<const double> values,
                                             const CovariateField& field, std::span<const double> xs);

/// Per-coordinate posterior mean of ell over post-burn-in sweeps.
std::vector<double> posterior_mean_ell(const ChainTrace& trace, std::size_t burn_in);

/// Share of grid points where lower <= truth <= upper.
double band_coverage(const IntensityEstimate& estimate, const TruthSpec& truth);

}  // namespace coxgp
