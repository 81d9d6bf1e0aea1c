#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "coxgp/geometry.hpp"
#include "coxgp/linalg.hpp"
#include "coxgp/rng.hpp"

namespace coxgp {

/// Regular grid of nodes over a window, boundaries included, row-major.
struct FieldGrid {
  Window window;
  std::vector<std::size_t> counts;  // nodes per spatial axis

  FieldGrid(Window w, std::vector<std::size_t> c);
  static FieldGrid uniform(const Window& w, std::size_t per_axis);

  std::size_t dim() const { return window.dim(); }
  std::size_t size() const;
  void node(std::size_t index, std::span<double> out) const;
  std::vector<double> node(std::size_t index) const;
  bool operator==(const FieldGrid&) const = default;
};

/// Real-valued d-variate field stored at grid nodes (node-major, d per node).
struct RawField {
  FieldGrid grid;
  std::size_t dim = 1;
  std::vector<double> values;
};

/// d-variate covariate field with values in [0,1]^d, evaluated by
/// multilinear interpolation between grid nodes.
class CovariateField {
 public:
  CovariateField(FieldGrid grid, std::size_t dim, std::vector<double> values);

  const FieldGrid& grid() const { return grid_; }
  const Window& window() const { return grid_.window; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return grid_.size(); }
  const std::vector<double>& values() const { return values_; }
  std::span<const double> value_at(std::size_t node) const { return {values_.data() + node * dim_, dim_}; }

  /// Throws if x is outside the window.
  void evaluate(std::span<const double> x, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> x) const;

 private:
  FieldGrid grid_;
  std::size_t dim_;
  std::vector<double> values_;
};

/// Length-scale presets of the synthetic covariates (first and second coordinate).
inline constexpr double kFineFieldLengthscale = 0.005;
inline constexpr double kCoarseFieldLengthscale = 0.05;
inline constexpr std::size_t kDefaultFieldResolution = 51;

/// Draws centered Gaussian fields with covariance exp(-|x - x'|^2 / lengthscale)
/// on a grid. The Cholesky factor of the gram matrix is computed once.
class SeFieldSampler {
 public:
  SeFieldSampler(FieldGrid grid, double lengthscale);

  const FieldGrid& grid() const { return grid_; }
  double lengthscale() const { return lengthscale_; }
  double jitter() const { return factor_.jitter; }
  const Eigen::MatrixXd& gram() const { return gram_; }

  std::vector<double> sample(Rng& rng) const;

 private:
  FieldGrid grid_;
  double lengthscale_;
  Eigen::MatrixXd gram_;
  CholeskyFactor factor_;
};

/// One draw of a scalar SE field; deterministic given the seed.
RawField sample_se_field(const Window& window, std::size_t resolution, double lengthscale, std::uint64_t seed);

/// Stacks scalar fields on a common grid into one d-variate field.
RawField stack_fields(const std::vector<RawField>& components);

/// Standard normal c.d.f., clamped into the open unit interval.
double normal_cdf(double x);

/// Applies the standard normal c.d.f. componentwise.
CovariateField gaussianize(const RawField& raw);

enum class Preprocess { NormalCdf, StandardizedNormalCdf, EmpiricalCdf, None };

/// Maps raw covariate fields into [0,1]^d, pooling statistics across all
/// fields: Phi of raw values, Phi of per-coordinate standardized values, or
/// the pooled empirical c.d.f. (rank / (m + 1)). None requires values in [0,1].
std::vector<CovariateField> preprocess_fields(const std::vector<RawField>& raw, Preprocess mode);

}  // namespace coxgp
