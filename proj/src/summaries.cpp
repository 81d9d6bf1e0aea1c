#include "coxgp/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coxgp/error.hpp"
#include "coxgp/model.hpp"
#include "coxgp/parallel.hpp"

namespace coxgp {

std::vector<const StateSnapshot*> post_burn_in_states(const ChainTrace& trace, std::size_t burn_in) {
  std::vector<const StateSnapshot*> out;
  for (const auto& s : trace.states) {
    if (s.sweep > burn_in) out.push_back(&s);
  }
  if (out.empty()) throw Error("summaries: no stored states after burn-in");
  return out;
}

namespace {

double stencil_intensity(const StateSnapshot& s, const Stencil& st) {
  double w = 0.0;
  for (std::size_t k = 0; k < st.size; ++k) w += st.weight[k] * s.w[st.index[k]];
  return s.rho_star * sigmoid(w);
}

std::vector<Stencil> grid_stencils(const InterpolationBasis& basis, const EvalGrid& grid) {
  require(basis.dim() == grid.dim(), "summaries: grid and basis dimensions differ");
  std::vector<Stencil> out(grid.size());
  std::vector<double> z(grid.dim());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.point(p, z);
    out[p] = basis.stencil(z);
  }
  return out;
}

void check_states(const std::vector<const StateSnapshot*>& states, const InterpolationBasis& basis) {
  for (const auto* s : states) require(s->w.size() == basis.size(), "summaries: state does not match the basis");
}

}  // namespace

double snapshot_intensity(const StateSnapshot& state, const InterpolationBasis& basis, std::span<const double> z) {
  require(state.w.size() == basis.size(), "snapshot_intensity: state does not match the basis");
  return stencil_intensity(state, basis.stencil(z));
}

double sorted_quantile(std::span<const double> sorted, double p) {
  require(!sorted.empty(), "sorted_quantile: empty sample");
  require(p >= 0.0 && p <= 1.0, "sorted_quantile: probability outside [0,1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> posterior_mean(const ChainTrace& trace, std::size_t burn_in, const InterpolationBasis& basis,
                                   const EvalGrid& grid) {
  const auto states = post_burn_in_states(trace, burn_in);
  check_states(states, basis);
  const auto stencils = grid_stencils(basis, grid);
  std::vector<double> mean(grid.size(), 0.0);
  for (const auto* s : states) {
    for (std::size_t p = 0; p < grid.size(); ++p) mean[p] += stencil_intensity(*s, stencils[p]);
  }
  for (double& m : mean) m /= static_cast<double>(states.size());
  return mean;
}

Band credible_band(const ChainTrace& trace, std::size_t burn_in, const InterpolationBasis& basis,
                   const EvalGrid& grid, double level) {
  const IntensityEstimate e = summarize_posterior(trace, burn_in, basis, grid, level);
  return Band{e.lower, e.upper};
}

IntensityEstimate summarize_posterior(const ChainTrace& trace, std::size_t burn_in, const InterpolationBasis& basis,
                                      const EvalGrid& grid, double level, ThreadPool* pool) {
  require(level >= 0.0 && level < 1.0, "credible_band: level must lie in [0,1)");
  const auto states = post_burn_in_states(trace, burn_in);
  check_states(states, basis);
  const auto stencils = grid_stencils(basis, grid);
  const std::size_t count = grid.size();
  IntensityEstimate out{grid, std::vector<double>(count), std::vector<double>(count), std::vector<double>(count),
                        level, states.size()};

  // Grid points are processed in blocks so the sample buffer stays small.
  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  auto block = [&](std::size_t b) {
    const std::size_t begin = b * kBlock;
    const std::size_t end = std::min(count, begin + kBlock);
    std::vector<double> buf(states.size());
    for (std::size_t p = begin; p < end; ++p) {
      for (std::size_t s = 0; s < states.size(); ++s) buf[s] = stencil_intensity(*states[s], stencils[p]);
      double sum = 0.0;
      for (double v : buf) sum += v;
      out.mean[p] = sum / static_cast<double>(buf.size());
      std::sort(buf.begin(), buf.end());
      out.lower[p] = sorted_quantile(buf, 0.5 * (1.0 - level));
      out.upper[p] = sorted_quantile(buf, 0.5 * (1.0 + level));
    }
  };
  if (pool) {
    pool->parallel_for(blocks, block);
  } else {
    for (std::size_t b = 0; b < blocks; ++b) block(b);
  }
  return out;
}

std::vector<double> truth_on_grid(const TruthSpec& truth, const EvalGrid& grid) {
  require(truth.dim() == grid.dim(), "truth_on_grid: grid and truth dimensions differ");
  std::vector<double> out(grid.size());
  std::vector<double> z(grid.dim());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.point(p, z);
    out[p] = truth_intensity(truth, z);
  }
  return out;
}

double truth_l2_norm(const TruthSpec& truth, const EvalGrid& grid) {
  const std::vector<double> t = truth_on_grid(truth, grid);
  std::vector<double> sq(t.size());
  for (std::size_t p = 0; p < t.size(); ++p) sq[p] = t[p] * t[p];
  return std::sqrt(pairwise_sum(sq.data(), sq.size()) / static_cast<double>(sq.size()));
}

L2Error l2_error(std::span<const double> values, const TruthSpec& truth, const EvalGrid& grid) {
  require(values.size() == grid.size(), "l2_error: values do not match the grid");
  const std::vector<double> t = truth_on_grid(truth, grid);
  std::vector<double> diff(t.size());
  std::vector<double> sq(t.size());
  for (std::size_t p = 0; p < t.size(); ++p) {
    diff[p] = (values[p] - t[p]) * (values[p] - t[p]);
    sq[p] = t[p] * t[p];
  }
  const double m = static_cast<double>(t.size());
  L2Error e;
  e.absolute = std::sqrt(pairwise_sum(diff.data(), diff.size()) / m);
  const double norm = std::sqrt(pairwise_sum(sq.data(), sq.size()) / m);
  e.relative = norm > 0.0 ? e.absolute / norm : std::numeric_limits<double>::infinity();
  return e;
}

double dz_distance_uniform(std::span<const double> rho1, std::span<const double> rho2, double window_volume) {
  require(rho1.size() == rho2.size() && !rho1.empty(), "dz_distance: size mismatch");
  require(window_volume > 0.0, "dz_distance: window volume must be positive");
  std::vector<double> sq(rho1.size());
  for (std::size_t p = 0; p < rho1.size(); ++p) {
    require(rho1[p] >= 0.0 && rho2[p] >= 0.0, "dz_distance: negative intensity");
    const double d = std::sqrt(rho1[p]) - std::sqrt(rho2[p]);
    sq[p] = d * d;
  }
  return std::sqrt(window_volume * pairwise_sum(sq.data(), sq.size()) / static_cast<double>(sq.size()));
}

DzEstimate dz_distance_empirical(const IntensityFn& rho1, const IntensityFn& rho2,
                                 std::span<const CovariateField> fields, const QuadratureRule& quadrature) {
  require(!fields.empty(), "dz_distance: no covariate fields");
  std::vector<double> per_field(fields.size());
  std::vector<double> z;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const CovariateField& field = fields[f];
    require(field.window() == quadrature.window, "dz_distance: field window differs from the quadrature window");
    z.resize(field.dim());
    double total = 0.0;
    for (std::size_t q = 0; q < quadrature.size(); ++q) {
      field.evaluate(quadrature.node(q), z);
      const double a = rho1(z);
      const double b = rho2(z);
      require(a >= 0.0 && b >= 0.0, "dz_distance: negative intensity");
      const double d = std::sqrt(a) - std::sqrt(b);
      total += quadrature.weights[q] * d * d;
    }
    per_field[f] = total;
  }
  const double m = static_cast<double>(per_field.size());
  DzEstimate out;
  out.squared = pairwise_sum(per_field.data(), per_field.size()) / m;
  double ss = 0.0;
  for (double v : per_field) ss += (v - out.squared) * (v - out.squared);
  out.squared_se = per_field.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
  out.distance = std::sqrt(out.squared);
  return out;
}

double interpolate_on_grid(const EvalGrid& grid, std::span<const double> values, std::span<const double> z) {
  const std::size_t d = grid.dim();
  require(z.size() == d && values.size() == grid.size(), "interpolate_on_grid: dimension mismatch");
  const std::size_t m = grid.points_per_axis();
  std::vector<std::size_t> base(d);
  std::vector<double> frac(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (!(z[j] >= 0.0 && z[j] <= 1.0)) throw Error("interpolate_on_grid: point outside the grid hull");
    const double t = z[j] * static_cast<double>(m - 1);
    const auto i = std::min(static_cast<std::size_t>(std::floor(t)), m - 2);
    base[j] = i;
    frac[j] = t - static_cast<double>(i);
  }
  double value = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    double weight = 1.0;
    std::size_t index = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const bool up = (corner >> (d - 1 - j)) & 1U;
      weight *= up ? frac[j] : 1.0 - frac[j];
      index = index * m + base[j] + (up ? 1 : 0);
    }
    if (weight != 0.0) value += weight * values[index];
  }
  return value;
}

std::vector<double> plugin_spatial_intensity(const EvalGrid& grid, std::span<const double> values,
                                             const CovariateField& field, std::span<const double> xs) {
  require(field.dim() == grid.dim(), "plugin_spatial_intensity: field and grid dimensions differ");
  const std::size_t dd = field.window().dim();
  require(xs.size() % dd == 0, "plugin_spatial_intensity: ragged spatial points");
  std::vector<double> out(xs.size() / dd);
  std::vector<double> z(field.dim());
  for (std::size_t p = 0; p < out.size(); ++p) {
    field.evaluate(xs.subspan(p * dd, dd), z);
    out[p] = interpolate_on_grid(grid, values, z);
  }
  return out;
}

std::vector<double> posterior_mean_ell(const ChainTrace& trace, std::size_t burn_in) {
  std::vector<double> mean(trace.dim, 0.0);
  std::size_t count = 0;
  for (const auto& r : trace.sweeps) {
    if (r.sweep <= burn_in) continue;
    for (std::size_t j = 0; j < trace.dim; ++j) mean[j] += r.ell[j];
    ++count;
  }
  if (count == 0) throw Error("posterior_mean_ell: no sweeps after burn-in");
  for (double& m : mean) m /= static_cast<double>(count);
  return mean;
}

double band_coverage(const IntensityEstimate& estimate, const TruthSpec& truth) {
  const std::vector<double> t = truth_on_grid(truth, estimate.grid);
  std::size_t inside = 0;
  for (std::size_t p = 0; p < t.size(); ++p) {
    if (estimate.lower[p] <= t[p] && t[p] <= estimate.upper[p]) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(t.size());
}

}  // namespace coxgp
