#include "coxgp/kernel_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coxgp/error.hpp"
#include "coxgp/parallel.hpp"

namespace coxgp {

namespace {

double type7_quantile(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Covariate values at quadrature nodes, node-major.
std::vector<double> node_covariates(const CovariateField& field, const QuadratureRule& quadrature) {
  require(field.window() == quadrature.window, "kernel baseline: field and quadrature windows differ");
  const std::size_t d = field.dim();
  std::vector<double> out(quadrature.size() * d);
  for (std::size_t q = 0; q < quadrature.size(); ++q) {
    field.evaluate(quadrature.node(q), std::span<double>(out.data() + q * d, d));
  }
  return out;
}

std::vector<double> event_covariates(const PointPattern& pattern, const CovariateField& field) {
  const std::size_t d = field.dim();
  std::vector<double> out(pattern.size() * d);
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    field.evaluate(pattern.point(k), std::span<double>(out.data() + k * d, d));
  }
  return out;
}

double kernel_sum(const std::vector<double>& samples, const std::vector<double>* weights, std::size_t d,
                  std::span<const double> h, std::span<const double> z) {
  const std::size_t m = samples.size() / d;
  double norm = 1.0;
  for (std::size_t j = 0; j < d; ++j) norm *= h[j] * std::sqrt(2.0 * std::numbers::pi);
  double total = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    double e = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double t = (samples[s * d + j] - z[j]) / h[j];
      e += t * t;
    }
    const double k = std::exp(-0.5 * e);
    total += weights ? (*weights)[s] * k : k;
  }
  return total / norm;
}

SingleKernelEstimate estimate_from_covariates(const std::vector<double>& nodes, const std::vector<double>& weights,
                                              const std::vector<double>& events, double volume, std::size_t d,
                                              std::span<const double> h, std::span<const double> points) {
  const std::size_t count = points.size() / d;
  SingleKernelEstimate out;
  out.values.assign(count, 0.0);
  out.supported.assign(count, 0);
  out.bandwidth.assign(h.begin(), h.end());
  for (std::size_t p = 0; p < count; ++p) {
    const std::span<const double> z(points.data() + p * d, d);
    const double g = kernel_sum(nodes, &weights, d, h, z);
    if (!(g >= kOccupationFloor * volume)) continue;
    out.supported[p] = 1;
    out.values[p] = events.empty() ? 0.0 : kernel_sum(events, nullptr, d, h, z) / g;
  }
  return out;
}

}  // namespace

double product_gaussian_kernel(std::span<const double> u, std::span<const double> h) {
  require(u.size() == h.size(), "product_gaussian_kernel: dimension mismatch");
  double value = 1.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double t = u[j] / h[j];
    value *= std::exp(-0.5 * t * t) / (h[j] * std::sqrt(2.0 * std::numbers::pi));
  }
  return value;
}

double silverman_bandwidth(std::span<const double> samples) {
  require(samples.size() >= 2, "silverman_bandwidth: at least two samples are required");
  const double m = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= m;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (m - 1.0));
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = type7_quantile(sorted, 0.75) - type7_quantile(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  // A tied middle half with nonzero variance falls back to the sd.
  if (!(spread > 0.0)) spread = sd;
  if (!(spread > 0.0)) throw Error("silverman_bandwidth: degenerate sample with zero spread");
  return 0.9 * spread * std::pow(m, -0.2);
}

std::vector<double> occupation_bandwidth(const CovariateField& field, const QuadratureRule& quadrature) {
  const std::size_t d = field.dim();
  const std::vector<double> nodes = node_covariates(field, quadrature);
  std::vector<double> h(d);
  std::vector<double> coord(quadrature.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t q = 0; q < quadrature.size(); ++q) coord[q] = nodes[q * d + j];
    h[j] = silverman_bandwidth(coord);
  }
  return h;
}

std::vector<double> replicate_bandwidth(const PointPattern& pattern, const CovariateField& field,
                                        const QuadratureRule& quadrature, BandwidthSource source) {
  if (source == BandwidthSource::Events && pattern.size() >= 2) {
    const std::size_t d = field.dim();
    const std::vector<double> events = event_covariates(pattern, field);
    std::vector<double> h(d);
    std::vector<double> coord(pattern.size());
    bool ok = true;
    for (std::size_t j = 0; j < d && ok; ++j) {
      for (std::size_t k = 0; k < pattern.size(); ++k) coord[k] = events[k * d + j];
      const auto [lo, hi] = std::minmax_element(coord.begin(), coord.end());
      ok = *hi > *lo;
      if (ok) h[j] = silverman_bandwidth(coord);
    }
    if (ok) return h;
  }
  return occupation_bandwidth(field, quadrature);
}

double spatial_cdf_density(const CovariateField& field, const QuadratureRule& quadrature,
                           std::span<const double> bandwidth, std::span<const double> z) {
  require(bandwidth.size() == field.dim() && z.size() == field.dim(), "spatial_cdf_density: dimension mismatch");
  for (double h : bandwidth) require(h > 0.0, "spatial_cdf_density: bandwidth must be positive");
  const std::vector<double> nodes = node_covariates(field, quadrature);
  return kernel_sum(nodes, &quadrature.weights, field.dim(), bandwidth, z);
}

SingleKernelEstimate kernel_estimate_single(const PointPattern& pattern, const CovariateField& field,
                                            const QuadratureRule& quadrature, std::span<const double> bandwidth,
                                            std::span<const double> points) {
  const std::size_t d = field.dim();
  require(bandwidth.size() == d, "kernel_estimate_single: bandwidth dimension mismatch");
  require(points.size() % d == 0, "kernel_estimate_single: ragged evaluation points");
  for (double h : bandwidth) require(h > 0.0, "kernel_estimate_single: bandwidth must be positive");
  return estimate_from_covariates(node_covariates(field, quadrature), quadrature.weights,
                                  event_covariates(pattern, field), quadrature.window.volume(), d, bandwidth, points);
}

KernelEstimate kernel_estimate_average(const Dataset& dataset, const QuadratureRule& quadrature,
                                       std::span<const double> points, KernelVariant variant, ThreadPool* pool,
                                       BandwidthSource source) {
  require(!dataset.empty(), "kernel_estimate_average: empty dataset");
  const std::size_t d = dataset.covariate_dim();
  require(points.size() % d == 0, "kernel_estimate_average: ragged evaluation points");
  const std::size_t n = dataset.size();
  const std::size_t count = points.size() / d;

  std::vector<SingleKernelEstimate> single(n);
  std::vector<std::vector<double>> events(n);
  auto one = [&](std::size_t i) {
    const Replicate& rep = dataset[i];
    const std::vector<double> h = replicate_bandwidth(rep.pattern, rep.field, quadrature, source);
    events[i] = event_covariates(rep.pattern, rep.field);
    single[i] = estimate_from_covariates(node_covariates(rep.field, quadrature), quadrature.weights, events[i],
                                         quadrature.window.volume(), d, h, points);
  };
  if (pool) {
    pool->parallel_for(n, one);
  } else {
    for (std::size_t i = 0; i < n; ++i) one(i);
  }

  KernelEstimate out;
  out.dim = d;
  out.points.assign(points.begin(), points.end());
  out.values.assign(count, 0.0);
  out.supported.assign(count, 0);
  out.variant = variant;
  for (const auto& s : single) out.bandwidths.insert(out.bandwidths.end(), s.bandwidth.begin(), s.bandwidth.end());

  // Empirical support: event covariate range inflated by one bandwidth.
  std::vector<double> support_lo(n * d, 0.0);
  std::vector<double> support_hi(n * d, -1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = events[i].size() / d;
    for (std::size_t j = 0; j < d && k > 0; ++j) {
      double lo = events[i][j];
      double hi = lo;
      for (std::size_t e = 1; e < k; ++e) {
        lo = std::min(lo, events[i][e * d + j]);
        hi = std::max(hi, events[i][e * d + j]);
      }
      support_lo[i * d + j] = lo - single[i].bandwidth[j];
      support_hi[i * d + j] = hi + single[i].bandwidth[j];
    }
  }

  for (std::size_t p = 0; p < count; ++p) {
    const double* z = points.data() + p * d;
    double total = 0.0;
    double weight = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!single[i].supported[p]) continue;
      if (variant == KernelVariant::PlainAverage) {
        total += single[i].values[p];
        weight += 1.0;
        continue;
      }
      const std::size_t k = events[i].size() / d;
      if (k == 0) continue;
      bool inside = true;
      for (std::size_t j = 0; j < d && inside; ++j) {
        inside = z[j] >= support_lo[i * d + j] && z[j] <= support_hi[i * d + j];
      }
      if (!inside) continue;
      total += static_cast<double>(k) * single[i].values[p];
      weight += static_cast<double>(k);
    }
    if (weight > 0.0) {
      out.values[p] = total / weight;
      out.supported[p] = 1;
    }
  }
  return out;
}

KernelEstimate kernel_estimate_average(const Dataset& dataset, const QuadratureRule& quadrature, const EvalGrid& grid,
                                       KernelVariant variant, ThreadPool* pool, BandwidthSource source) {
  require(grid.dim() == dataset.covariate_dim(), "kernel_estimate_average: grid dimension mismatch");
  const std::vector<double> points = grid.points();
  return kernel_estimate_average(dataset, quadrature, points, variant, pool, source);
}

}  // namespace coxgp
