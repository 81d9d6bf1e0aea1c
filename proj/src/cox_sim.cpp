#include "coxgp/cox_sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "coxgp/error.hpp"
#include "coxgp/parallel.hpp"

namespace coxgp {

PointPattern::PointPattern(Window window, std::vector<double> coords)
    : window_(std::move(window)), coords_(std::move(coords)) {
  require(coords_.size() % dim() == 0, "point pattern: coordinate count not a multiple of the dimension");
  for (std::size_t k = 0; k < size(); ++k) {
    require(window_.contains(point(k)), "point pattern: point outside the window");
  }
}

void PointPattern::add(std::span<const double> x) {
  require(window_.contains(x), "point pattern: point outside the window");
  coords_.insert(coords_.end(), x.begin(), x.end());
}

Dataset::Dataset(std::vector<Replicate> replicates) : replicates_(std::move(replicates)) {
  if (replicates_.empty()) return;
  const Window& w = replicates_.front().field.window();
  const std::size_t d = replicates_.front().field.dim();
  for (const auto& r : replicates_) {
    require(r.field.window() == w && r.pattern.window() == w, "dataset: replicates must share one window");
    require(r.field.dim() == d, "dataset: replicates must share one covariate dimension");
  }
}

const Window& Dataset::window() const {
  require(!replicates_.empty(), "dataset: empty");
  return replicates_.front().field.window();
}

std::size_t Dataset::covariate_dim() const {
  require(!replicates_.empty(), "dataset: empty");
  return replicates_.front().field.dim();
}

std::size_t Dataset::total_events() const {
  std::size_t k = 0;
  for (const auto& r : replicates_) k += r.pattern.size();
  return k;
}

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Diagonal-covariance bivariate normal density.
double normal_pdf_2d(double z1, double z2, double m1, double m2, double s1, double s2) {
  return std_normal_pdf((z1 - m1) / s1) * std_normal_pdf((z2 - m2) / s2) / (s1 * s2);
}

// Bivariate skew-normal density 2 phi_2(z - xi; s I) Phi(alpha^T (z - xi) / sqrt(s)).
double skew_normal_pdf_2d(double z1, double z2, double xi1, double xi2, double s, double a1, double a2) {
  const double omega = std::sqrt(s);
  const double u1 = (z1 - xi1) / omega;
  const double u2 = (z2 - xi2) / omega;
  const double phi2 = std_normal_pdf(u1) * std_normal_pdf(u2) / s;
  return 2.0 * phi2 * std_normal_cdf(a1 * u1 + a2 * u2);
}

double smoothstep5(double t) {
  const double p = 6.0 * std::pow(t, 5) - 15.0 * std::pow(t, 4) + 10.0 * std::pow(t, 3);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

double skew_normal_pdf(double x, double xi, double omega, double alpha) {
  const double u = (x - xi) / omega;
  return 2.0 / omega * std_normal_pdf(u) * std_normal_cdf(alpha * u);
}

double plateau(double z, double center, double a) {
  // distance to the centre on the unit circle
  double delta = std::fabs(z - center);
  delta = std::fmod(delta, 1.0);
  delta = std::min(delta, 1.0 - delta);
  return 1.0 - smoothstep5(2.0 * delta / a);
}

std::size_t TruthSpec::dim() const {
  switch (kind) {
    case TruthKind::SkewNormal1d:
    case TruthKind::ExpDecay1d:
    case TruthKind::Plateau1d:
      return 1;
    case TruthKind::Anisotropic2d:
    case TruthKind::SkewBasin2d:
    case TruthKind::SkewPeaks2d:
      return 2;
    case TruthKind::Constant:
      return constant_dim;
  }
  return 1;
}

std::string TruthSpec::name() const {
  switch (kind) {
    case TruthKind::SkewNormal1d: return "skew_normal_1d";
    case TruthKind::ExpDecay1d: return "exp_decay_1d";
    case TruthKind::Plateau1d: return "plateau_1d";
    case TruthKind::Anisotropic2d: return "anisotropic_2d";
    case TruthKind::SkewBasin2d: return "skew_basin_2d";
    case TruthKind::SkewPeaks2d: return "skew_peaks_2d";
    case TruthKind::Constant:
      return (constant_dim == 1 ? "constant:" : "constant" + std::to_string(constant_dim) + "d:") +
             std::to_string(constant_value);
  }
  return "unknown";
}

TruthSpec TruthSpec::constant(double value, std::size_t dim) {
  require(value >= 0.0 && std::isfinite(value), "truth: constant intensity must be finite and >= 0");
  require(dim >= 1 && dim <= 3, "truth: constant dimension must be 1, 2 or 3");
  TruthSpec s;
  s.kind = TruthKind::Constant;
  s.constant_dim = dim;
  s.constant_value = value;
  return s;
}

TruthSpec TruthSpec::from_name(const std::string& name) {
  static const std::map<std::string, TruthKind> kinds{
      {"skew_normal_1d", TruthKind::SkewNormal1d}, {"exp_decay_1d", TruthKind::ExpDecay1d},
      {"plateau_1d", TruthKind::Plateau1d},        {"anisotropic_2d", TruthKind::Anisotropic2d},
      {"skew_basin_2d", TruthKind::SkewBasin2d},   {"skew_peaks_2d", TruthKind::SkewPeaks2d},
  };
  if (auto it = kinds.find(name); it != kinds.end()) {
    TruthSpec s;
    s.kind = it->second;
    return s;
  }
  for (std::size_t d = 1; d <= 3; ++d) {
    const std::string prefix = d == 1 ? "constant:" : "constant" + std::to_string(d) + "d:";
    if (name.rfind(prefix, 0) == 0) {
      try {
        return constant(std::stod(name.substr(prefix.size())), d);
      } catch (const std::invalid_argument&) {
        throw Error("truth: cannot parse constant value in '" + name + "'");
      }
    }
  }
  throw Error("truth: unknown ground truth '" + name + "'");
}

double truth_intensity(const TruthSpec& spec, std::span<const double> z) {
  require(z.size() == spec.dim(), "truth: dimension mismatch");
  switch (spec.kind) {
    case TruthKind::SkewNormal1d:
      return 5.0 * skew_normal_pdf(z[0], 0.8, 0.3, -5.0);
    case TruthKind::ExpDecay1d:
      return 2.0 * std::exp(3.0 * (1.0 - z[0]) - 1.0);
    case TruthKind::Plateau1d:
      return 2.0 + 2.0 * plateau(z[0], 0.75, 0.375) - 2.0 * plateau(z[0], 0.25, 0.375);
    case TruthKind::Anisotropic2d: {
      const double v = 10.0 - 10.0 * normal_pdf_2d(z[0], z[1], 0.8, 0.3, 0.08, 0.5) +
                       10.0 * normal_pdf_2d(z[0], z[1], 0.3, 0.8, 0.08, 0.5);
      return std::max(0.0, v);
    }
    case TruthKind::SkewBasin2d:
      return std::max(0.0, 30.0 - 90.0 * skew_normal_pdf_2d(z[0], z[1], 0.3, 0.3, 0.5, -1.0, -1.0));
    case TruthKind::SkewPeaks2d:
      return 6.0 * skew_normal_pdf_2d(z[0], z[1], 0.3, 0.8, 0.03, -1.0, -1.0) +
             14.0 * skew_normal_pdf_2d(z[0], z[1], 0.7, 0.2, 0.05, 3.0, -2.0);
    case TruthKind::Constant:
      return spec.constant_value;
  }
  return 0.0;
}

double dominating_bound(const TruthSpec& spec) {
  const std::size_t d = spec.dim();
  const std::size_t m = d == 1 ? 4096 : d == 2 ? 512 : 64;
  EvalGrid grid(d, m);
  std::vector<double> z(d);
  double best = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, z);
    best = std::max(best, truth_intensity(spec, z));
  }
  return best * 1.001;
}

PointPattern simulate_cox(const CovariateField& field, const IntensityFn& rho, double rho_upper, Rng& rng) {
  require(rho_upper > 0.0 && std::isfinite(rho_upper), "simulate_cox: rho_upper must be positive and finite");
  const Window& window = field.window();
  const std::size_t D = window.dim();
  PointPattern pattern(window);
  const std::uint64_t k_dom = rng.poisson(rho_upper * window.volume());
  std::vector<double> x(D), z(field.dim());
  for (std::uint64_t k = 0; k < k_dom; ++k) {
    for (std::size_t j = 0; j < D; ++j) x[j] = window.lower()[j] + window.extent(j) * rng.uniform();
    field.evaluate(x, z);
    const double r = rho(z);
    if (!(r >= 0.0) || r > rho_upper) {
      throw Error("simulate_cox: intensity " + std::to_string(r) + " violates the dominating bound " +
                  std::to_string(rho_upper));
    }
    if (rng.uniform() * rho_upper < r) pattern.add(x);
  }
  return pattern;
}

PointPattern simulate_cox(const CovariateField& field, const IntensityFn& rho, double rho_upper, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_cox(field, rho, rho_upper, rng);
}

FieldSimulator::FieldSimulator(const Window& window, const FieldConfig& config) {
  require(config.dim() >= 1, "field config: need at least one covariate");
  std::map<double, std::shared_ptr<const SeFieldSampler>> cache;
  const FieldGrid grid = FieldGrid::uniform(window, config.resolution);
  for (double ls : config.lengthscales) {
    auto& slot = cache[ls];
    if (!slot) slot = std::make_shared<const SeFieldSampler>(grid, ls);
    samplers_.push_back(slot);
  }
}

RawField FieldSimulator::sample_raw(Rng& rng) const {
  std::vector<RawField> parts;
  parts.reserve(samplers_.size());
  for (const auto& s : samplers_) parts.push_back(RawField{s->grid(), 1, s->sample(rng)});
  return parts.size() == 1 ? std::move(parts.front()) : stack_fields(parts);
}

CovariateField FieldSimulator::sample(Rng& rng) const { return gaussianize(sample_raw(rng)); }

Dataset simulate_dataset(std::size_t n, const Window& window, const FieldConfig& fields, const TruthSpec& truth,
                         std::uint64_t seed, ThreadPool* pool) {
  require(n >= 1, "simulate_dataset: n must be >= 1");
  require(fields.dim() == truth.dim(), "simulate_dataset: truth dimension does not match the covariates");
  const FieldSimulator simulator(window, fields);
  const double upper = truth.kind == TruthKind::Constant ? std::max(truth.constant_value, 1e-300) * 1.001
                                                         : dominating_bound(truth);
  const IntensityFn rho = [&truth](std::span<const double> z) { return truth_intensity(truth, z); };

  std::vector<std::optional<Replicate>> slots(n);
  auto one = [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    CovariateField field = simulator.sample(rng);
    PointPattern pattern = simulate_cox(field, rho, upper, rng);
    slots[i].emplace(Replicate{std::move(pattern), std::move(field)});
  };
  if (pool) {
    pool->parallel_for(n, one);
  } else {
    for (std::size_t i = 0; i < n; ++i) one(i);
  }
  std::vector<Replicate> reps;
  reps.reserve(n);
  for (auto& s : slots) reps.push_back(std::move(*s));
  return Dataset(std::move(reps));
}

}  // namespace coxgp
