#include "toda/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "toda/error.hpp"

namespace toda {

std::string_view to_string(GridMode mode) {
  return mode == GridMode::cartesian ? "cartesian" : "radial";
}

GridMode grid_mode_from_string(std::string_view name) {
  if (name == "cartesian") return GridMode::cartesian;
  if (name == "radial") return GridMode::radial;
  throw ConfigurationError("mode", "unknown grid mode '" + std::string(name) + "'");
}

Grid::Grid(GridMode mode, int n, double rho_max) : mode_(mode), n_(n), rho_max_(rho_max) {
  if (mode == GridMode::cartesian) {
    h_ = 2.0 * rho_max / (n - 1);
    const std::size_t count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    x_.resize(count);
    y_.resize(count);
    radius_.resize(count);
    interior_.assign(count, 0);
    for (int row = 0; row < n; ++row) {
      for (int col = 0; col < n; ++col) {
        const std::size_t i = node(row, col);
        x_[i] = -rho_max + col * h_;
        y_[i] = -rho_max + row * h_;
        radius_[i] = std::hypot(x_[i], y_[i]);
        // Outer row/column can never be interior: the stencil needs four neighbours.
        const bool edge = row == 0 || col == 0 || row == n - 1 || col == n - 1;
        interior_[i] = (!edge && radius_[i] < rho_max - 0.5 * h_) ? 1 : 0;
      }
    }
    ring_.assign(count, 0);
    for (int row = 0; row < n; ++row) {
      for (int col = 0; col < n; ++col) {
        const std::size_t i = node(row, col);
        if (interior_[i]) continue;
        const bool touches = (row > 0 && interior_[node(row - 1, col)]) ||
                             (row < n - 1 && interior_[node(row + 1, col)]) ||
                             (col > 0 && interior_[node(row, col - 1)]) ||
                             (col < n - 1 && interior_[node(row, col + 1)]);
        ring_[i] = touches ? 1 : 0;
      }
    }
  } else {
    h_ = rho_max / (n - 1);
    x_.resize(n);
    y_.assign(n, 0.0);
    radius_.resize(n);
    interior_.assign(n, 1);
    ring_.assign(n, 0);
    for (int i = 0; i < n; ++i) {
      x_[i] = i == n - 1 ? rho_max : i * h_;
      radius_[i] = x_[i];
    }
    interior_[n - 1] = 0;
    ring_[n - 1] = 1;
  }

  boundary_.resize(interior_.size());
  interior_index_.assign(interior_.size(), npos);
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    boundary_[i] = interior_[i] ? 0 : 1;
    if (interior_[i]) {
      interior_index_[i] = interior_nodes_.size();
      interior_nodes_.push_back(i);
    }
  }
}

double Grid::data_radius(std::size_t i) const {
  double rho = radius_[i];
  if (!interior_[i] && !ring_[i]) rho = std::min(rho, rho_max_);
  if (inside_unit_disc()) rho = std::min(rho, 0.5 * (1.0 + rho_max_));
  return rho;
}

Mask Grid::collar_mask(double width) const {
  Mask out(size(), 0);
  for (std::size_t i : interior_nodes_) out[i] = radius_[i] <= rho_max_ - width ? 1 : 0;
  return out;
}

Mask Grid::subdisc_interior_mask(double radius) const {
  Mask out(size(), 0);
  for (std::size_t i : interior_nodes_) out[i] = radius_[i] < radius - 0.5 * h_ ? 1 : 0;
  return out;
}

GridPtr build_grid(GridMode mode, int n, double rho_max) {
  if (n < 8) throw ConfigurationError("n", "needs at least 8 nodes, got " + std::to_string(n));
  if (!(rho_max > 0.0) || !std::isfinite(rho_max)) {
    throw ConfigurationError("rho_max", "must be a positive finite radius");
  }
  return std::make_shared<const Grid>(mode, n, rho_max);
}

Field::Field(GridPtr grid, double fill) : grid_(std::move(grid)), values_(grid_->size(), fill) {}

Field::Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) {
    throw ShapeError("field has " + std::to_string(values_.size()) + " values for a grid of " +
                     std::to_string(grid_->size()) + " nodes");
  }
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_grid(const Field& a, const Field& b) {
  if (a.grid_ptr() != b.grid_ptr() && !a.grid().same_shape(b.grid())) {
    throw ShapeError("fields live on different grids");
  }
}

void require_on_grid(const Field& f, const Grid& grid) {
  if (&f.grid() != &grid && !f.grid().same_shape(grid)) throw ShapeError("field does not live on this grid");
}

double laplacian_at(const Field& field, std::size_t i) {
  const Grid& g = field.grid();
  const double h2 = g.spacing() * g.spacing();
  if (g.mode() == GridMode::cartesian) {
    const std::size_t n = static_cast<std::size_t>(g.n());
    return (field[i - 1] + field[i + 1] + field[i - n] + field[i + n] - 4.0 * field[i]) / h2;
  }
  if (i == 0) return 4.0 * (field[1] - field[0]) / h2;
  const double rho = g.radius(i);
  const double second = (field[i + 1] - 2.0 * field[i] + field[i - 1]) / h2;
  const double first = (field[i + 1] - field[i - 1]) / (2.0 * g.spacing());
  return second + first / rho;
}

Field laplacian(const Field& field) {
  Field out(field.grid_ptr());
  for (std::size_t i : field.grid().interior_nodes()) out[i] = laplacian_at(field, i);
  return out;
}

namespace {

void require_mask(const Field& field, const Mask& mask) {
  if (mask.size() != field.size()) throw ShapeError("mask size does not match field");
  if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
    throw DomainError("extremum over an empty mask");
  }
}

template <typename Better>
std::size_t arg_extremum(const Field& field, const Mask& mask, Better better) {
  require_mask(field, mask);
  std::size_t best = Grid::npos;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (!mask[i]) continue;
    if (best == Grid::npos || better(field[i], field[best])) best = i;
  }
  return best;
}

}  // namespace

std::size_t argmax_over(const Field& field, const Mask& mask) {
  return arg_extremum(field, mask, [](double a, double b) { return a > b; });
}

std::size_t argmin_over(const Field& field, const Mask& mask) {
  return arg_extremum(field, mask, [](double a, double b) { return a < b; });
}

double sup_over(const Field& field, const Mask& mask) { return field[argmax_over(field, mask)]; }

double inf_over(const Field& field, const Mask& mask) { return field[argmin_over(field, mask)]; }

double sup_norm(const Field& field, const Mask& mask) {
  require_mask(field, mask);
  double best = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (mask[i]) best = std::max(best, std::abs(field[i]));
  }
  return best;
}

}  // namespace toda
