#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace toda {

enum class GridMode { cartesian, radial };

std::string_view to_string(GridMode mode);
GridMode grid_mode_from_string(std::string_view name);

/// Per-node flag vector; nonzero means "selected".
using Mask = std::vector<std::uint8_t>;

/// Discretization of the disc |z| < rho_max.
///
/// Cartesian grids place n x n nodes uniformly on the square [-rho_max, rho_max]^2
/// (row-major, x fastest). A node is interior iff |z| < rho_max - h/2; every other
/// node is boundary, including the cut cells next to the circle. Boundary nodes with
/// an interior 4-neighbour form the "ring"; the rest lie outside every stencil.
///
/// Radial grids place n nodes at rho_i = i h, h = rho_max / (n - 1). The last node is
/// the only boundary node.
///
/// Immutable after construction.
class Grid {
 public:
  Grid(GridMode mode, int n, double rho_max);

  GridMode mode() const noexcept { return mode_; }
  int n() const noexcept { return n_; }
  double rho_max() const noexcept { return rho_max_; }
  double spacing() const noexcept { return h_; }
  std::size_t size() const noexcept { return x_.size(); }

  /// True when the domain sits inside the unit disc, where the Poincare metric lives.
  bool inside_unit_disc() const noexcept { return rho_max_ < 1.0; }

  double x(std::size_t i) const { return x_[i]; }
  double y(std::size_t i) const { return y_[i]; }
  double radius(std::size_t i) const { return radius_[i]; }

  /// Radius at which boundary data is evaluated. Equals radius(i) on interior and
  /// ring nodes; nodes outside every stencil are projected onto |z| = rho_max. On disc
  /// problems the result is kept strictly below 1.
  double data_radius(std::size_t i) const;

  bool is_interior(std::size_t i) const { return interior_[i] != 0; }
  bool is_ring(std::size_t i) const { return ring_[i] != 0; }

  const Mask& interior_mask() const noexcept { return interior_; }
  const Mask& boundary_mask() const noexcept { return boundary_; }
  const Mask& ring_mask() const noexcept { return ring_; }
  Mask all_mask() const { return Mask(size(), 1); }

  /// Interior nodes with |z| <= rho_max - width; used to skip the boundary layer.
  Mask collar_mask(double width) const;
  /// Interior nodes with |z| < radius - h/2 (the interior of a concentric sub-disc).
  Mask subdisc_interior_mask(double radius) const;

  std::span<const std::size_t> interior_nodes() const noexcept { return interior_nodes_; }
  /// Position of node `i` in interior_nodes(), or npos for boundary nodes.
  std::size_t interior_index(std::size_t i) const { return interior_index_[i]; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// Cartesian row/column helpers.
  std::size_t node(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(col);
  }

  /// Same mode, node count and radius.
  bool same_shape(const Grid& other) const noexcept {
    return mode_ == other.mode_ && n_ == other.n_ && rho_max_ == other.rho_max_;
  }

 private:
  GridMode mode_;
  int n_;
  double rho_max_;
  double h_;
  std::vector<double> x_, y_, radius_;
  Mask interior_, boundary_, ring_;
  std::vector<std::size_t> interior_nodes_;
  std::vector<std::size_t> interior_index_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validates parameters and builds a grid. Throws ConfigurationError naming the
/// offending parameter when n < 8 or rho_max <= 0.
GridPtr build_grid(GridMode mode, int n, double rho_max);

/// One real value per node of a grid.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid, double fill = 0.0);
  Field(GridPtr grid, std::vector<double> values);

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const Grid& grid() const noexcept { return *grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool all_finite() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Throws ShapeError unless both fields live on grids of the same shape.
void require_same_grid(const Field& a, const Field& b);
void require_on_grid(const Field& f, const Grid& grid);

/// Builds a field by evaluating fn(x, y) at every node (radial nodes use y = 0).
template <typename Fn>
Field sample(const GridPtr& grid, Fn&& fn) {
  Field out(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) out[i] = fn(grid->x(i), grid->y(i));
  return out;
}

/// Flat Laplacian d2/dx2 + d2/dy2 on interior nodes (5-point stencil), or
/// w'' + w'/rho in radial mode with the rho = 0 limit 2 w''(0). Boundary nodes carry 0.
Field laplacian(const Field& field);

/// Value of the discrete Laplacian at one interior node.
double laplacian_at(const Field& field, std::size_t node);

/// Extrema over the selected nodes. Throw DomainError for an empty mask.
double sup_over(const Field& field, const Mask& mask);
double inf_over(const Field& field, const Mask& mask);
/// max |f| over the selected nodes.
double sup_norm(const Field& field, const Mask& mask);

/// Node index of the extremum (first one on ties).
std::size_t argmax_over(const Field& field, const Mask& mask);
std::size_t argmin_over(const Field& field, const Mask& mask);

}  // namespace toda
