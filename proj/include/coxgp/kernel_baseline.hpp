#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coxgp/cox_sim.hpp"
#include "coxgp/geometry.hpp"

namespace coxgp {

class ThreadPool;

/// 0.9 min(sd, IQR / 1.34) m^(-1/5); IQR from linearly interpolated quartiles.
double silverman_bandwidth(std::span<const double> samples);

/// Per-coordinate Silverman bandwidths of the covariate values at the
/// quadrature nodes (the spatial occupation sample of the field).
std::vector<double> occupation_bandwidth(const CovariateField& field, const QuadratureRule& quadrature);

/// Product Gaussian kernel prod_j phi(u_j / h_j) / h_j.
double product_gaussian_kernel(std::span<const double> u, std::span<const double> h);

/// g(z) = sum_q weight_q k_h(Z(node_q) - z): kernel-smoothed occupation
/// density of the covariate values over the window (integrates to vol(W)).
double spatial_cdf_density(const CovariateField& field, const QuadratureRule& quadrature,
                           std::span<const double> bandwidth, std::span<const double> z);

enum class KernelVariant { PlainAverage, WeightedSupport };

/// Sample behind each replicate's Silverman bandwidth: covariate values at
/// the quadrature nodes (occupation) or at the events, falling back to the
/// occupation sample when a replicate has fewer than two distinct event values.
enum class BandwidthSource { Occupation, Events };

/// Per-coordinate Silverman bandwidths from the chosen sample.
std::vector<double> replicate_bandwidth(const PointPattern& pattern, const CovariateField& field,
                                        const QuadratureRule& quadrature, BandwidthSource source);

/// Relative floor below which g(z) / vol(W) counts as unsupported.
inline constexpr double kOccupationFloor = 1e-3;

struct SingleKernelEstimate {
  std::vector<double> values;
  std::vector<std::uint8_t> supported;
  std::vector<double> bandwidth;
};

/// Ratio-form estimate sum_k k_h(Z(X_k) - z) / g(z) at each of the points
/// (flattened, d per point). Points with g below the floor are unsupported
/// and carry value 0.
SingleKernelEstimate kernel_estimate_single(const PointPattern& pattern, const CovariateField& field,
                                            const QuadratureRule& quadrature, std::span<const double> bandwidth,
                                            std::span<const double> points);

struct KernelEstimate {
  std::size_t dim = 0;
  std::vector<double> points;  // flattened, dim per point
  std::vector<double> values;  // 0 where unsupported
  std::vector<std::uint8_t> supported;
  /// Per-replicate bandwidths, replicate-major.
  std::vector<double> bandwidths;
  KernelVariant variant = KernelVariant::PlainAverage;

  std::size_t size() const { return values.size(); }
};

/// Average of the per-replicate estimates. Plain: unweighted mean over the
/// replicates supported at z. WeightedSupport: event-count weighted mean over
/// the replicates whose event covariates, inflated by one bandwidth per
/// coordinate, cover z.
KernelEstimate kernel_estimate_average(const Dataset& dataset, const QuadratureRule& quadrature,
                                       std::span<const double> points, KernelVariant variant,
                                       ThreadPool* pool = nullptr, BandwidthSource source = BandwidthSource::Events);

KernelEstimate kernel_estimate_average(const Dataset& dataset, const QuadratureRule& quadrature, const EvalGrid& grid,
                                       KernelVariant variant, ThreadPool* pool = nullptr,
                                       BandwidthSource source = BandwidthSource::Events);

}  // namespace coxgp
