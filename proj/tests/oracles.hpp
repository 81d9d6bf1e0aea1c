#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls the library's evaluation code paths: fields, hat
// functions, quadrature nodes and covariances are rebuilt from their
// definitions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "coxgp/cox_sim.hpp"
#include "coxgp/random_field.hpp"

namespace oracle {

/// Multilinear interpolation of a covariate field, written for 2-d windows.
inline std::vector<double> field_value(const coxgp::CovariateField& field, std::span<const double> x) {
  const auto& g = field.grid();
  const std::size_t mx = g.counts[0];
  const std::size_t my = g.counts[1];
  const double sx = (x[0] - g.window.lower()[0]) / g.window.extent(0) * static_cast<double>(mx - 1);
  const double sy = (x[1] - g.window.lower()[1]) / g.window.extent(1) * static_cast<double>(my - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(sx), mx - 2);
  const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(sy), my - 2);
  const double tx = sx - static_cast<double>(i);
  const double ty = sy - static_cast<double>(j);
  const std::size_t d = field.dim();
  std::vector<double> out(d);
  for (std::size_t c = 0; c < d; ++c) {
    const auto at = [&](std::size_t a, std::size_t b) { return field.values()[(a * my + b) * d + c]; };
    out[c] = (1 - tx) * (1 - ty) * at(i, j) + (1 - tx) * ty * at(i, j + 1) + tx * (1 - ty) * at(i + 1, j) +
             tx * ty * at(i + 1, j + 1);
  }
  return out;
}

/// Piecewise-linear interpolant through V equally spaced nodes on [0,1].
inline double hat_1d(std::span<const double> coeffs, double z) {
  const std::size_t V = coeffs.size();
  const double s = z * static_cast<double>(V - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(s), V - 2);
  const double t = s - static_cast<double>(i);
  return (1 - t) * coeffs[i] + t * coeffs[i + 1];
}

inline double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

/// Midpoints of a uniform cells x cells partition of a 2-d window.
inline std::vector<std::array<double, 2>> midpoints(const coxgp::Window& w, std::size_t cells) {
  std::vector<std::array<double, 2>> out;
  for (std::size_t a = 0; a < cells; ++a) {
    for (std::size_t b = 0; b < cells; ++b) {
      out.push_back({w.lower()[0] + (static_cast<double>(a) + 0.5) * w.extent(0) / static_cast<double>(cells),
                     w.lower()[1] + (static_cast<double>(b) + 0.5) * w.extent(1) / static_cast<double>(cells)});
    }
  }
  return out;
}

/// Log-likelihood of a 1-d-covariate model evaluated term by term:
/// sum_i [ sum_k log(rho* sigma(w(Z_i(X_k)))) - int_W (rho* sigma(w(Z_i(x))) - 1) dx ].
inline double loglik_1d(const coxgp::Dataset& data, std::size_t cells, std::span<const double> w, double rho_star) {
  const auto& win = data.window();
  const double cell_area = win.volume() / static_cast<double>(cells * cells);
  const auto mids = midpoints(win, cells);
  double total = 0.0;
  for (const auto& rep : data.replicates()) {
    for (std::size_t k = 0; k < rep.pattern.size(); ++k) {
      const double z = field_value(rep.field, rep.pattern.point(k))[0];
      total += std::log(rho_star * logistic(hat_1d(w, z)));
    }
    for (const auto& m : mids) {
      const double z = field_value(rep.field, m)[0];
      total -= (rho_star * logistic(hat_1d(w, z)) - 1.0) * cell_area;
    }
  }
  return total;
}

/// SE covariance exp(-sum_j ell_j (z_vj - z_uj)^2) plus a diagonal nugget.
inline Eigen::MatrixXd ard_matrix(std::span<const double> nodes, std::size_t d, std::span<const double> ell,
                                  double nugget) {
  const std::size_t V = nodes.size() / d;
  Eigen::MatrixXd c(V, V);
  for (std::size_t u = 0; u < V; ++u) {
    for (std::size_t v = 0; v < V; ++v) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = nodes[u * d + j] - nodes[v * d + j];
        s += ell[j] * diff * diff;
      }
      c(u, v) = std::exp(-s);
    }
    c(u, u) += nugget;
  }
  return c;
}

/// -1/2 w' C^-1 w - 1/2 log det C through a full-pivot LU factorization.
inline double log_gaussian_dense(const Eigen::MatrixXd& c, const Eigen::VectorXd& w) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
  const Eigen::VectorXd y = lu.solve(w);
  return -0.5 * w.dot(y) - 0.5 * std::log(lu.determinant());
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// CDF of a density tabulated on an increasing grid, by the trapezoid rule.
class TabulatedCdf {
 public:
  TabulatedCdf(std::vector<double> x, const std::vector<double>& log_density) : x_(std::move(x)) {
    const double top = *std::max_element(log_density.begin(), log_density.end());
    cum_.assign(x_.size(), 0.0);
    for (std::size_t i = 1; i < x_.size(); ++i) {
      const double a = std::exp(log_density[i - 1] - top);
      const double b = std::exp(log_density[i] - top);
      cum_[i] = cum_[i - 1] + 0.5 * (a + b) * (x_[i] - x_[i - 1]);
    }
    const double total = cum_.back();
    for (auto& c : cum_) c /= total;
  }

  double operator()(double v) const {
    if (v <= x_.front()) return 0.0;
    if (v >= x_.back()) return 1.0;
    const auto it = std::upper_bound(x_.begin(), x_.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin());
    const double t = (v - x_[i - 1]) / (x_[i] - x_[i - 1]);
    return cum_[i - 1] + t * (cum_[i] - cum_[i - 1]);
  }

 private:
  std::vector<double> x_;
  std::vector<double> cum_;
};

inline double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double variance(std::span<const double> xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

}  // namespace oracle
