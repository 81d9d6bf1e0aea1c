#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace coxgp {

using PointFn = std::function<double(std::span<const double>)>;

/// Axis-aligned rectangular observation window in R^D.
class Window {
 public:
  Window(std::vector<double> lower, std::vector<double> upper);

  /// [-1/2, 1/2]^2, the window of every synthetic experiment.
  static Window centered_unit_square();

  std::size_t dim() const { return lower_.size(); }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }
  double extent(std::size_t k) const { return upper_[k] - lower_[k]; }
  double volume() const;
  bool contains(std::span<const double> x) const;

  bool operator==(const Window&) const = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Piecewise-constant (midpoint) rule on a uniform cell partition.
struct QuadratureRule {
  Window window;
  std::size_t cells_per_axis = 0;
  std::vector<double> nodes;    // size() * dim, node-major
  std::vector<double> weights;  // size()

  std::size_t size() const { return weights.size(); }
  std::size_t dim() const { return window.dim(); }
  std::span<const double> node(std::size_t q) const { return {nodes.data() + q * dim(), dim()}; }
};

QuadratureRule build_quadrature(const Window& window, std::size_t cells_per_axis);

/// Sum of weight * f(node); throws if f is non-finite at any node.
double integrate(const QuadratureRule& rule, const PointFn& f);

/// Tensor grid over [0,1]^d with `points_per_axis` equally spaced points per
/// axis, endpoints included. Index order is row-major (last axis fastest).
class EvalGrid {
 public:
  EvalGrid(std::size_t dim, std::size_t points_per_axis);

  /// 400 points in 1-d, 60x60 in 2-d.
  static EvalGrid defaults(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t points_per_axis() const { return m_; }
  std::size_t size() const { return size_; }
  double coordinate(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(m_ - 1); }
  std::vector<double> point(std::size_t index) const;
  void point(std::size_t index, std::span<double> out) const;
  /// Flattened points, size() * dim().
  std::vector<double> points() const;

 private:
  std::size_t dim_;
  std::size_t m_;
  std::size_t size_;
};

enum class BasisKind { PiecewiseLinear1d, Triangulation2d, Trilinear3d };

struct BasisSpec {
  std::size_t dim = 1;
  /// Nodes per axis; 0 means "derive from max_element_area" (2-d only).
  std::size_t nodes_per_axis = 0;
  /// Upper bound on triangle area for the 2-d mesh.
  double max_element_area = 0.0;
};

/// Sparse representation of one evaluation point: sum_k weight[k] * coeff[index[k]].
struct Stencil {
  static constexpr std::size_t kMaxSize = 8;
  std::array<std::uint32_t, kMaxSize> index{};
  std::array<double, kMaxSize> weight{};
  std::size_t size = 0;
};

/// Nodal (hat-function) basis over [0,1]^d on a regular grid: linear hats in
/// 1-d, barycentric hats on a structured triangulation in 2-d (each grid
/// square split along its anti-diagonal), trilinear cells in 3-d.
class InterpolationBasis {
 public:
  InterpolationBasis(BasisKind kind, std::size_t dim, std::size_t nodes_per_axis);

  BasisKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t nodes_per_axis() const { return m_; }
  std::size_t size() const { return size_; }
  /// Number of nonzero basis functions at a generic point.
  std::size_t stencil_size() const;
  /// Maximum triangle area (2-d) or cell volume (1-d, 3-d).
  double element_measure() const;

  std::span<const double> node(std::size_t v) const { return {nodes_.data() + v * dim_, dim_}; }
  const std::vector<double>& nodes() const { return nodes_; }

  /// Throws if z is outside [0,1]^d.
  Stencil stencil(std::span<const double> z) const;
  double basis_function(std::size_t v, std::span<const double> z) const;
  double evaluate(std::span<const double> coeffs, std::span<const double> z) const;

 private:
  BasisKind kind_;
  std::size_t dim_;
  std::size_t m_;
  std::size_t size_;
  std::vector<double> nodes_;
};

InterpolationBasis build_basis(const BasisSpec& spec);

/// Nodes per axis of the structured 2-d mesh for a maximal element area.
std::size_t triangulation_nodes_per_axis(double max_element_area);

double evaluate_interpolant(const InterpolationBasis& basis, std::span<const double> coeffs,
                            std::span<const double> z);

}  // namespace coxgp
