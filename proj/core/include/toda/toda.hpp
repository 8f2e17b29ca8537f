#pragma once

#include <Eigen/SparseCore>
#include <span>
#include <string_view>
#include <vector>

#include "toda/grid.hpp"
#include "toda/weight.hpp"

namespace toda {

// Unknowns are the log-densities w_j = log vol(H_j) against the flat frame dz,
// j = 1..r-1. The degenerate slot H_0 = H_r has density
//   V_0 = Q exp(-(w_1 + ... + w_{r-1})),
// always formed as a product so that zeros of Q never pass through a logarithm.
// The discrete system, per interior node and component,
//   N_j = (1/4) Lap w_j - (2 e^{w_j} - e^{w_{j-1}} - e^{w_{j+1}}),  e^{w_0} = e^{w_r} = V_0,
// reduces for r = 2, Q = 0 to Liouville's Lap w = 8 e^w.

enum class BoundaryStrategy { model_poincare, weight_flat, exhaustion };
enum class InitialGuess { automatic, model, flat, provided };
enum class LinearSolverKind { automatic, direct, iterative };

std::string_view to_string(BoundaryStrategy s);
BoundaryStrategy boundary_strategy_from_string(std::string_view name);
std::string_view to_string(InitialGuess g);
InitialGuess initial_guess_from_string(std::string_view name);

struct SolverConfig {
  double tolerance = 1e-10;  ///< residual sup-norm over interior nodes
  int max_newton = 50;
  double damping = 0.5;  ///< Armijo step reduction factor
  int max_halvings = 20;
  int continuation_steps = 8;
  BoundaryStrategy boundary = BoundaryStrategy::model_poincare;
  /// `automatic` starts from the flat solution for weight_flat, from the model otherwise.
  InitialGuess initial_guess = InitialGuess::automatic;
  std::vector<Field> provided;  ///< r-1 fields, used with InitialGuess::provided
  /// `automatic` factorizes directly up to n = 257 and uses BiCGSTAB above.
  LinearSolverKind linear_solver = LinearSolverKind::automatic;
};

/// Throws ConfigurationError naming the first bad field.
void validate(const SolverConfig& config);

struct TodaSolution {
  GridPtr grid;
  int r = 2;
  WeightDensity weight;
  BoundaryStrategy boundary = BoundaryStrategy::model_poincare;
  std::vector<Field> w;  ///< w_1..w_{r-1}
  Field q;               ///< weight density on the grid
  Field v0;              ///< degenerate density Q exp(-sum w)
  double residual_sup = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
  /// Exhaustion only: stage radii and the drift between consecutive stages, measured as
  /// the sup difference over the interior of the first stage.
  std::vector<double> exhaustion_radii;
  std::vector<double> exhaustion_drift;

  /// Density of slot j = 0..r-1 at a node (slot 0 is V_0).
  double density(int slot, std::size_t node) const;
};

/// -2 log(1 - rho^2): log-density of the curvature-normalized Poincare metric.
double poincare_log_density(double rho);

/// Closed-form model solution w_j = log lambda_j - 2 log(1 - |z|^2), evaluated at
/// each node's data radius. Requires a grid inside the unit disc.
std::vector<Field> model_fields(const GridPtr& grid, int r);

/// V_0 = Q exp(-sum_j w_j) at every node.
Field degenerate_density(std::span<const Field> w, const Field& q);

/// Residual fields N_1..N_{r-1}; zero on boundary nodes.
std::vector<Field> toda_residual(std::span<const Field> w, const Field& q);

/// Max |N_j| over interior nodes and components.
double residual_sup_norm(std::span<const Field> w, const Field& q);

/// Exact linearization of toda_residual at (w, Q).
class TodaJacobian {
 public:
  TodaJacobian(std::vector<Field> w, Field q);

  /// J v in field space. Perturbations on boundary nodes enter through the stencil.
  std::vector<Field> apply(std::span<const Field> v) const;

  /// The operator restricted to interior unknowns, ordered node-major:
  /// row = interior_index * (r-1) + (j-1). Boundary values are held fixed.
  const Eigen::SparseMatrix<double>& matrix() const noexcept { return matrix_; }

  int components() const noexcept { return static_cast<int>(w_.size()); }

 private:
  std::vector<Field> w_;
  Field q_;
  Field v0_;
  Eigen::SparseMatrix<double> matrix_;
};

TodaJacobian toda_jacobian(std::span<const Field> w, const Field& q);

/// Damped Newton solve of the Toda system with the configured boundary strategy.
///
/// Throws ConvergenceError (carrying the residual history) if Newton fails even
/// after continuation in the weight amplitude, StrategyError if weight_flat meets
/// Q = 0 on the boundary ring, ConfigurationError for Poincare data outside the
/// unit disc.
TodaSolution solve_toda(const WeightDensity& weight, const GridPtr& grid, const SolverConfig& config = {});

/// Recomputes the residual sup-norm from the stored fields.
double recompute_residual(const TodaSolution& sol);

/// max_j sup |w_j - w_{r-j}| over all nodes.
double symmetry_defect(const TodaSolution& sol);

/// Log-densities eta_1..eta_r of the diagonal metric: eta_{j+1} - eta_j = w_j and
/// sum_j eta_j = 0.
std::vector<Field> recover_diagonal_metric(const TodaSolution& sol);

/// sum_{j=0}^{r-1} e^{w_j} with e^{w_0} = V_0: the Higgs-field norm density.
Field energy_density(const TodaSolution& sol);

/// Assembles a solution from given fields (used when loading files); recomputes
/// Q, V_0 and the residual.
TodaSolution make_solution(const WeightDensity& weight, const GridPtr& grid, BoundaryStrategy boundary,
                           std::vector<Field> w);

}  // namespace toda
