#include "coxgp/random_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "coxgp/error.hpp"

namespace coxgp {

FieldGrid::FieldGrid(Window w, std::vector<std::size_t> c) : window(std::move(w)), counts(std::move(c)) {
  require(counts.size() == window.dim(), "field grid: counts/window dimension mismatch");
  for (auto n : counts) require(n >= 2, "field grid: need at least 2 nodes per axis");
}

FieldGrid FieldGrid::uniform(const Window& w, std::size_t per_axis) {
  return FieldGrid(w, std::vector<std::size_t>(w.dim(), per_axis));
}

std::size_t FieldGrid::size() const {
  std::size_t n = 1;
  for (auto c : counts) n *= c;
  return n;
}

void FieldGrid::node(std::size_t index, std::span<double> out) const {
  for (std::size_t k = dim(); k-- > 0;) {
    const std::size_t i = index % counts[k];
    index /= counts[k];
    out[k] = window.lower()[k] + window.extent(k) * static_cast<double>(i) / static_cast<double>(counts[k] - 1);
  }
}

std::vector<double> FieldGrid::node(std::size_t index) const {
  std::vector<double> x(dim());
  node(index, x);
  return x;
}

CovariateField::CovariateField(FieldGrid grid, std::size_t dim, std::vector<double> values)
    : grid_(std::move(grid)), dim_(dim), values_(std::move(values)) {
  require(dim_ >= 1, "covariate field: dimension must be >= 1");
  require(values_.size() == grid_.size() * dim_, "covariate field: value count does not match grid");
  for (double v : values_) require(v >= 0.0 && v <= 1.0, "covariate field: values must lie in [0,1]");
}

void CovariateField::evaluate(std::span<const double> x, std::span<double> out) const {
  const std::size_t D = grid_.dim();
  if (!grid_.window.contains(x)) throw Error("covariate field: point outside the window");
  std::array<std::size_t, 8> cell{};
  std::array<double, 8> t{};
  require(D <= cell.size(), "covariate field: spatial dimension too large");
  for (std::size_t k = 0; k < D; ++k) {
    const std::size_t m = grid_.counts[k];
    const double s = (x[k] - grid_.window.lower()[k]) / grid_.window.extent(k) * static_cast<double>(m - 1);
    auto i = static_cast<std::size_t>(std::floor(s));
    if (i > m - 2) i = m - 2;
    cell[k] = i;
    t[k] = s - static_cast<double>(i);
  }
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t corners = std::size_t{1} << D;
  for (std::size_t c = 0; c < corners; ++c) {
    std::size_t index = 0;
    double w = 1.0;
    for (std::size_t k = 0; k < D; ++k) {
      const std::size_t bit = (c >> (D - 1 - k)) & 1U;
      index = index * grid_.counts[k] + cell[k] + bit;
      w *= bit ? t[k] : 1.0 - t[k];
    }
    if (w == 0.0) continue;
    for (std::size_t j = 0; j < dim_; ++j) out[j] += w * values_[index * dim_ + j];
  }
  // Convex combination of [0,1] values; guard rounding at the edges.
  for (auto& v : out) v = std::clamp(v, 0.0, 1.0);
}

std::vector<double> CovariateField::evaluate(std::span<const double> x) const {
  std::vector<double> out(dim_);
  evaluate(x, out);
  return out;
}

SeFieldSampler::SeFieldSampler(FieldGrid grid, double lengthscale) : grid_(std::move(grid)), lengthscale_(lengthscale) {
  require(lengthscale > 0.0 && std::isfinite(lengthscale), "field sampler: lengthscale must be positive");
  const std::size_t n = grid_.size();
  const std::size_t D = grid_.dim();
  std::vector<double> pts(n * D);
  for (std::size_t i = 0; i < n; ++i) grid_.node(i, {pts.data() + i * D, D});
  gram_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    gram_(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < D; ++k) {
        const double diff = pts[i * D + k] - pts[j * D + k];
        d2 += diff * diff;
      }
      const double c = std::exp(-d2 / lengthscale);
      gram_(i, j) = c;
      gram_(j, i) = c;
    }
  }
  factor_ = jittered_cholesky(gram_);
}

std::vector<double> SeFieldSampler::sample(Rng& rng) const {
  const auto n = factor_.size();
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
  const Eigen::VectorXd x = factor_.lower.triangularView<Eigen::Lower>() * z;
  return {x.data(), x.data() + n};
}

RawField sample_se_field(const Window& window, std::size_t resolution, double lengthscale, std::uint64_t seed) {
  SeFieldSampler sampler(FieldGrid::uniform(window, resolution), lengthscale);
  Rng rng(seed);
  return RawField{sampler.grid(), 1, sampler.sample(rng)};
}

RawField stack_fields(const std::vector<RawField>& components) {
  require(!components.empty(), "stack_fields: no components");
  const FieldGrid& grid = components.front().grid;
  std::size_t d = 0;
  for (const auto& c : components) {
    require(c.grid == grid, "stack_fields: components live on different grids");
    d += c.dim;
  }
  const std::size_t n = grid.size();
  RawField out{grid, d, std::vector<double>(n * d)};
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t offset = 0;
    for (const auto& c : components) {
      for (std::size_t j = 0; j < c.dim; ++j) out.values[i * d + offset + j] = c.values[i * c.dim + j];
      offset += c.dim;
    }
  }
  return out;
}

double normal_cdf(double x) {
  if (!std::isfinite(x)) throw Error("normal_cdf: non-finite input");
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(0.5 * std::erfc(-x / std::sqrt(2.0)), lo, hi);
}

CovariateField gaussianize(const RawField& raw) {
  std::vector<double> v(raw.values.size());
  std::transform(raw.values.begin(), raw.values.end(), v.begin(), normal_cdf);
  return CovariateField(raw.grid, raw.dim, std::move(v));
}

std::vector<CovariateField> preprocess_fields(const std::vector<RawField>& raw, Preprocess mode) {
  std::vector<CovariateField> out;
  out.reserve(raw.size());
  if (raw.empty()) return out;
  const std::size_t d = raw.front().dim;
  for (const auto& r : raw) require(r.dim == d, "preprocess: covariate dimensions differ across fields");

  switch (mode) {
    case Preprocess::None:
      for (const auto& r : raw) out.emplace_back(r.grid, r.dim, r.values);
      return out;
    case Preprocess::NormalCdf:
      for (const auto& r : raw) out.push_back(gaussianize(r));
      return out;
    case Preprocess::StandardizedNormalCdf: {
      std::vector<double> mean(d, 0.0), sq(d, 0.0);
      std::size_t m = 0;
      for (const auto& r : raw) {
        const std::size_t n = r.values.size() / d;
        m += n;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < d; ++j) mean[j] += r.values[i * d + j];
      }
      for (auto& x : mean) x /= static_cast<double>(m);
      for (const auto& r : raw) {
        const std::size_t n = r.values.size() / d;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < d; ++j) {
            const double e = r.values[i * d + j] - mean[j];
            sq[j] += e * e;
          }
      }
      std::vector<double> sd(d);
      for (std::size_t j = 0; j < d; ++j) {
        sd[j] = std::sqrt(sq[j] / static_cast<double>(m > 1 ? m - 1 : 1));
        require(sd[j] > 0.0, "preprocess: covariate has zero spread");
      }
      for (const auto& r : raw) {
        std::vector<double> v(r.values.size());
        const std::size_t n = r.values.size() / d;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < d; ++j) v[i * d + j] = normal_cdf((r.values[i * d + j] - mean[j]) / sd[j]);
        out.emplace_back(r.grid, d, std::move(v));
      }
      return out;
    }
    case Preprocess::EmpiricalCdf: {
      std::vector<std::vector<double>> transformed(raw.size());
      for (std::size_t f = 0; f < raw.size(); ++f) transformed[f].resize(raw[f].values.size());
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> pooled;
        for (const auto& r : raw)
          for (std::size_t i = j; i < r.values.size(); i += d) pooled.push_back(r.values[i]);
        std::sort(pooled.begin(), pooled.end());
        const double denom = static_cast<double>(pooled.size() + 1);
        for (std::size_t f = 0; f < raw.size(); ++f) {
          const auto& r = raw[f];
          for (std::size_t i = j; i < r.values.size(); i += d) {
            // mid-rank for ties
            const auto lo = std::lower_bound(pooled.begin(), pooled.end(), r.values[i]);
            const auto hi = std::upper_bound(lo, pooled.end(), r.values[i]);
            const double rank = 0.5 * static_cast<double>((lo - pooled.begin()) + (hi - pooled.begin()) + 1);
            transformed[f][i] = rank / denom;
          }
        }
      }
      for (std::size_t f = 0; f < raw.size(); ++f) out.emplace_back(raw[f].grid, d, std::move(transformed[f]));
      return out;
    }
  }
  return out;
}

}  // namespace coxgp
