#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coxgp/geometry.hpp"
#include "coxgp/random_field.hpp"
#include "coxgp/rng.hpp"

namespace coxgp {

class ThreadPool;

/// Finite set of event locations inside a window.
class PointPattern {
 public:
  explicit PointPattern(Window window) : window_(std::move(window)) {}
  PointPattern(Window window, std::vector<double> coords);

  const Window& window() const { return window_; }
  std::size_t dim() const { return window_.dim(); }
  std::size_t size() const { return coords_.size() / dim(); }
  bool empty() const { return coords_.empty(); }
  std::span<const double> point(std::size_t k) const { return {coords_.data() + k * dim(), dim()}; }
  const std::vector<double>& coords() const { return coords_; }

  /// Throws if x is outside the window.
  void add(std::span<const double> x);

 private:
  Window window_;
  std::vector<double> coords_;
};

struct Replicate {
  PointPattern pattern;
  CovariateField field;
};

/// n independent (pattern, covariate field) pairs sharing one window and
/// one covariate dimension.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<Replicate> replicates);

  std::size_t size() const { return replicates_.size(); }
  bool empty() const { return replicates_.empty(); }
  const Replicate& operator[](std::size_t i) const { return replicates_[i]; }
  const std::vector<Replicate>& replicates() const { return replicates_; }
  const Window& window() const;
  std::size_t covariate_dim() const;
  std::size_t total_events() const;

 private:
  std::vector<Replicate> replicates_;
};

enum class TruthKind {
  SkewNormal1d,    // 5 f_SN(z; 0.8, 0.3, -5)
  ExpDecay1d,      // 2 exp(3(1 - z) - 1)
  Plateau1d,       // 2 + 2 P(z; 3/4, 3/8) - 2 P(z; 1/4, 3/8)
  Anisotropic2d,   // max{0, 10 - 10 f_N(.; (0.8,0.3), S) + 10 f_N(.; (0.3,0.8), S)}
  SkewBasin2d,     // max{0, 30 - 90 f_SN(.; (0.3,0.3), 0.5 I, (-1,-1))}
  SkewPeaks2d,     // 6 f_SN(.; (0.3,0.8), 0.03 I, (-1,-1)) + 14 f_SN(.; (0.7,0.2), 0.05 I, (3,-2))
  Constant,
};

/// A named ground-truth intensity on [0,1]^d.
struct TruthSpec {
  TruthKind kind = TruthKind::SkewNormal1d;
  std::size_t constant_dim = 1;
  double constant_value = 1.0;

  std::size_t dim() const;
  std::string name() const;

  /// Accepts the names returned by name(), plus "constant:<value>" and
  /// "constant2d:<value>".
  static TruthSpec from_name(const std::string& name);
  static TruthSpec constant(double value, std::size_t dim = 1);
};

/// 1-d skew-normal density (2/omega) phi((x-xi)/omega) Phi(alpha (x-xi)/omega).
double skew_normal_pdf(double x, double xi, double omega, double alpha);

/// Plateau bump 1 - p(2 delta(z, c) / a) with the quintic smoothstep p.
double plateau(double z, double center, double a);

double truth_intensity(const TruthSpec& spec, std::span<const double> z);

/// max of the truth over a dense grid of [0,1]^d, times 1.001.
double dominating_bound(const TruthSpec& spec);

using IntensityFn = std::function<double(std::span<const double>)>;

/// Lewis-Shedler thinning of a homogeneous Poisson process of rate rho_upper.
PointPattern simulate_cox(const CovariateField& field, const IntensityFn& rho, double rho_upper, Rng& rng);
PointPattern simulate_cox(const CovariateField& field, const IntensityFn& rho, double rho_upper, std::uint64_t seed);

struct FieldConfig {
  std::size_t resolution = kDefaultFieldResolution;
  /// One SE length-scale per covariate coordinate.
  std::vector<double> lengthscales{kFineFieldLengthscale};

  std::size_t dim() const { return lengthscales.size(); }
};

/// Reusable generator of gaussianized SE covariate fields.
class FieldSimulator {
 public:
  FieldSimulator(const Window& window, const FieldConfig& config);
  CovariateField sample(Rng& rng) const;
  RawField sample_raw(Rng& rng) const;
  std::size_t dim() const { return samplers_.size(); }

 private:
  std::vector<std::shared_ptr<const SeFieldSampler>> samplers_;
};

/// n i.i.d. replicates; replicate i uses the stream derive_seed(seed, i), so
/// the output does not depend on the pool's thread count.
Dataset simulate_dataset(std::size_t n, const Window& window, const FieldConfig& fields, const TruthSpec& truth,
                         std::uint64_t seed, ThreadPool* pool = nullptr);

}  // namespace coxgp
