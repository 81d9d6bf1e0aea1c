#include "coxgp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coxgp/error.hpp"

namespace coxgp {

Window::Window(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  require(!lower_.empty(), "window: dimension must be positive");
  require(lower_.size() == upper_.size(), "window: lower/upper dimension mismatch");
  for (std::size_t k = 0; k < lower_.size(); ++k) {
    require(std::isfinite(lower_[k]) && std::isfinite(upper_[k]) && lower_[k] < upper_[k],
            "window: need lower[k] < upper[k] on every axis");
  }
}

Window Window::centered_unit_square() { return Window({-0.5, -0.5}, {0.5, 0.5}); }

double Window::volume() const {
  double v = 1.0;
  for (std::size_t k = 0; k < dim(); ++k) v *= extent(k);
  return v;
}

bool Window::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t k = 0; k < dim(); ++k) {
    if (!(x[k] >= lower_[k] && x[k] <= upper_[k])) return false;
  }
  return true;
}

QuadratureRule build_quadrature(const Window& window, std::size_t cells_per_axis) {
  require(cells_per_axis >= 1, "quadrature: cells_per_axis must be >= 1");
  const std::size_t dim = window.dim();
  std::size_t count = 1;
  for (std::size_t k = 0; k < dim; ++k) count *= cells_per_axis;

  QuadratureRule rule{window, cells_per_axis, {}, {}};
  rule.nodes.resize(count * dim);
  rule.weights.assign(count, window.volume() / static_cast<double>(count));

  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t q = 0; q < count; ++q) {
    for (std::size_t k = 0; k < dim; ++k) {
      const double h = window.extent(k) / static_cast<double>(cells_per_axis);
      rule.nodes[q * dim + k] = window.lower()[k] + (static_cast<double>(idx[k]) + 0.5) * h;
    }
    for (std::size_t k = dim; k-- > 0;) {
      if (++idx[k] < cells_per_axis) break;
      idx[k] = 0;
    }
  }
  return rule;
}

double integrate(const QuadratureRule& rule, const PointFn& f) {
  double total = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double v = f(rule.node(q));
    if (!std::isfinite(v)) throw Error("integrate: integrand is not finite at node " + std::to_string(q));
    total += rule.weights[q] * v;
  }
  return total;
}

EvalGrid::EvalGrid(std::size_t dim, std::size_t points_per_axis) : dim_(dim), m_(points_per_axis) {
  require(dim >= 1, "eval grid: dimension must be >= 1");
  require(points_per_axis >= 2, "eval grid: need at least 2 points per axis");
  size_ = 1;
  for (std::size_t k = 0; k < dim; ++k) size_ *= m_;
}

EvalGrid EvalGrid::defaults(std::size_t dim) {
  if (dim == 1) return EvalGrid(1, 400);
  if (dim == 2) return EvalGrid(2, 60);
  return EvalGrid(dim, 20);
}

void EvalGrid::point(std::size_t index, std::span<double> out) const {
  for (std::size_t k = dim_; k-- > 0;) {
    out[k] = coordinate(index % m_);
    index /= m_;
  }
}

std::vector<double> EvalGrid::point(std::size_t index) const {
  std::vector<double> p(dim_);
  point(index, p);
  return p;
}

std::vector<double> EvalGrid::points() const {
  std::vector<double> out(size_ * dim_);
  for (std::size_t i = 0; i < size_; ++i) point(i, {out.data() + i * dim_, dim_});
  return out;
}

namespace {

std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

// Cell index and local coordinate of z along one axis of an m-node grid.
void locate(double z, std::size_t m, std::size_t& cell, double& t) {
  const double s = z * static_cast<double>(m - 1);
  auto i = static_cast<std::size_t>(std::floor(s));
  if (i > m - 2) i = m - 2;
  cell = i;
  t = s - static_cast<double>(i);
}

}  // namespace

InterpolationBasis::InterpolationBasis(BasisKind kind, std::size_t dim, std::size_t nodes_per_axis)
    : kind_(kind), dim_(dim), m_(nodes_per_axis) {
  const std::size_t expected = kind == BasisKind::PiecewiseLinear1d ? 1 : kind == BasisKind::Triangulation2d ? 2 : 3;
  require(dim == expected, "basis: kind/dimension mismatch");
  require(m_ >= 2, "basis: need at least 2 nodes per axis");
  size_ = ipow(m_, dim_);
  nodes_.resize(size_ * dim_);
  EvalGrid grid(dim_, m_);
  for (std::size_t v = 0; v < size_; ++v) grid.point(v, {nodes_.data() + v * dim_, dim_});
}

std::size_t InterpolationBasis::stencil_size() const {
  switch (kind_) {
    case BasisKind::PiecewiseLinear1d: return 2;
    case BasisKind::Triangulation2d: return 3;
    case BasisKind::Trilinear3d: return 8;
  }
  return 0;
}

double InterpolationBasis::element_measure() const {
  const double h = 1.0 / static_cast<double>(m_ - 1);
  switch (kind_) {
    case BasisKind::PiecewiseLinear1d: return h;
    case BasisKind::Triangulation2d: return 0.5 * h * h;
    case BasisKind::Trilinear3d: return h * h * h;
  }
  return 0.0;
}

Stencil InterpolationBasis::stencil(std::span<const double> z) const {
  if (z.size() != dim_) throw Error("basis: point dimension mismatch");
  for (double c : z) {
    if (!(c >= 0.0 && c <= 1.0)) throw Error("basis: point outside [0,1]^d");
  }
  Stencil s;
  switch (kind_) {
    case BasisKind::PiecewiseLinear1d: {
      std::size_t i;
      double t;
      locate(z[0], m_, i, t);
      s.size = 2;
      s.index[0] = static_cast<std::uint32_t>(i);
      s.weight[0] = 1.0 - t;
      s.index[1] = static_cast<std::uint32_t>(i + 1);
      s.weight[1] = t;
      break;
    }
    case BasisKind::Triangulation2d: {
      std::size_t i, j;
      double a, b;
      locate(z[0], m_, i, a);
      locate(z[1], m_, j, b);
      const auto id = [&](std::size_t ii, std::size_t jj) { return static_cast<std::uint32_t>(ii * m_ + jj); };
      s.size = 3;
      if (a + b <= 1.0) {
        // lower-left triangle (i,j), (i+1,j), (i,j+1)
        s.index = {id(i, j), id(i + 1, j), id(i, j + 1)};
        s.weight = {1.0 - a - b, a, b};
      } else {
        // upper-right triangle (i+1,j+1), (i+1,j), (i,j+1)
        s.index = {id(i + 1, j + 1), id(i + 1, j), id(i, j + 1)};
        s.weight = {a + b - 1.0, 1.0 - b, 1.0 - a};
      }
      break;
    }
    case BasisKind::Trilinear3d: {
      std::array<std::size_t, 3> cell{};
      std::array<double, 3> t{};
      for (std::size_t k = 0; k < 3; ++k) locate(z[k], m_, cell[k], t[k]);
      s.size = 8;
      for (std::size_t c = 0; c < 8; ++c) {
        std::size_t index = 0;
        double w = 1.0;
        for (std::size_t k = 0; k < 3; ++k) {
          const std::size_t bit = (c >> (2 - k)) & 1U;
          index = index * m_ + cell[k] + bit;
          w *= bit ? t[k] : 1.0 - t[k];
        }
        s.index[c] = static_cast<std::uint32_t>(index);
        s.weight[c] = w;
      }
      break;
    }
  }
  return s;
}

double InterpolationBasis::basis_function(std::size_t v, std::span<const double> z) const {
  const Stencil s = stencil(z);
  double value = 0.0;
  for (std::size_t k = 0; k < s.size; ++k) {
    if (s.index[k] == v) value += s.weight[k];
  }
  return value;
}

double InterpolationBasis::evaluate(std::span<const double> coeffs, std::span<const double> z) const {
  if (coeffs.size() != size_) throw Error("basis: coefficient vector has wrong length");
  const Stencil s = stencil(z);
  double value = 0.0;
  for (std::size_t k = 0; k < s.size; ++k) value += s.weight[k] * coeffs[s.index[k]];
  return value;
}

std::size_t triangulation_nodes_per_axis(double max_element_area) {
  require(max_element_area > 0.0 && max_element_area < 0.5, "basis: max_element_area must be in (0, 0.5)");
  // Area-constrained quality meshers produce elements averaging ~60% of the
  // bound; the structured mesh targets that mean size and never exceeds the bound.
  const auto minimal = static_cast<std::size_t>(std::ceil(std::sqrt(0.5 / max_element_area)));
  const auto typical = static_cast<std::size_t>(std::lround(std::sqrt(0.5 / (0.6 * max_element_area))));
  return std::max(minimal, typical) + 1;
}

InterpolationBasis build_basis(const BasisSpec& spec) {
  switch (spec.dim) {
    case 1:
      return InterpolationBasis(BasisKind::PiecewiseLinear1d, 1, spec.nodes_per_axis);
    case 2: {
      std::size_t m = spec.nodes_per_axis;
      if (m == 0) m = triangulation_nodes_per_axis(spec.max_element_area);
      InterpolationBasis basis(BasisKind::Triangulation2d, 2, m);
      if (spec.max_element_area > 0.0 && basis.element_measure() > spec.max_element_area) {
        throw Error("basis: requested nodes_per_axis violates max_element_area");
      }
      return basis;
    }
    case 3:
      return InterpolationBasis(BasisKind::Trilinear3d, 3, spec.nodes_per_axis);
    default:
      throw Error("basis: dimension must be 1, 2 or 3");
  }
}

double evaluate_interpolant(const InterpolationBasis& basis, std::span<const double> coeffs,
                            std::span<const double> z) {
  return basis.evaluate(coeffs, z);
}

}  // namespace coxgp
