#include "toda/toda.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "toda/error.hpp"
#include "toda/log.hpp"

namespace toda {

std::string_view to_string(BoundaryStrategy s) {
  switch (s) {
    case BoundaryStrategy::model_poincare: return "model_poincare";
    case BoundaryStrategy::weight_flat: return "weight_flat";
    case BoundaryStrategy::exhaustion: return "exhaustion";
  }
  return "model_poincare";
}

BoundaryStrategy boundary_strategy_from_string(std::string_view name) {
  if (name == "model_poincare") return BoundaryStrategy::model_poincare;
  if (name == "weight_flat") return BoundaryStrategy::weight_flat;
  if (name == "exhaustion") return BoundaryStrategy::exhaustion;
  throw ConfigurationError("boundary", "unknown boundary strategy '" + std::string(name) + "'");
}

std::string_view to_string(InitialGuess g) {
  switch (g) {
    case InitialGuess::automatic: return "automatic";
    case InitialGuess::model: return "model";
    case InitialGuess::flat: return "flat";
    case InitialGuess::provided: return "provided";
  }
  return "automatic";
}

InitialGuess initial_guess_from_string(std::string_view name) {
  if (name == "automatic") return InitialGuess::automatic;
  if (name == "model") return InitialGuess::model;
  if (name == "flat") return InitialGuess::flat;
  if (name == "provided") return InitialGuess::provided;
  throw ConfigurationError("initial_guess", "unknown initial guess '" + std::string(name) + "'");
}

void validate(const SolverConfig& config) {
  if (!(config.tolerance > 0.0)) throw ConfigurationError("tolerance", "must be positive");
  if (config.max_newton < 1) throw ConfigurationError("max_newton", "must be at least 1");
  if (!(config.damping > 0.0 && config.damping < 1.0)) throw ConfigurationError("damping", "must lie in (0, 1)");
  if (config.max_halvings < 0) throw ConfigurationError("max_halvings", "must be nonnegative");
  if (config.continuation_steps < 1) throw ConfigurationError("continuation_steps", "must be at least 1");
}

double TodaSolution::density(int slot, std::size_t node) const {
  return slot == 0 ? v0[node] : std::exp(w[static_cast<std::size_t>(slot - 1)][node]);
}

double poincare_log_density(double rho) { return -2.0 * std::log1p(-rho * rho); }

std::vector<Field> model_fields(const GridPtr& grid, int r) {
  if (!grid->inside_unit_disc()) {
    throw ConfigurationError("rho_max", "model data needs a grid inside the unit disc");
  }
  const auto lambda = lambda_coefficients(r);
  std::vector<Field> out;
  out.reserve(lambda.size());
  for (double l : lambda) {
    Field f(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) f[i] = std::log(l) + poincare_log_density(grid->data_radius(i));
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

double v0_at(std::span<const Field> w, const Field& q, std::size_t i) {
  if (q[i] == 0.0) return 0.0;
  double sum = 0.0;
  for (const Field& f : w) sum += f[i];
  return q[i] * std::exp(-sum);
}

void require_system(std::span<const Field> w, const Field& q) {
  if (w.empty()) throw ShapeError("need at least one log-density field (r >= 2)");
  for (const Field& f : w) {
    require_same_grid(f, q);
    if (!f.all_finite()) throw ValidationError("log-density fields must be finite");
  }
  for (double v : q.values()) {
    if (!(v >= 0.0)) throw ValidationError("weight density must be nonnegative");
  }
}

// Coefficients of (1/4) Lap at node i: diagonal plus up to four neighbours.
struct Stencil {
  double diag = 0.0;
  std::size_t nb[4] = {Grid::npos, Grid::npos, Grid::npos, Grid::npos};
  double coeff[4] = {0.0, 0.0, 0.0, 0.0};
};

Stencil quarter_laplacian_stencil(const Grid& g, std::size_t i) {
  Stencil s;
  const double h = g.spacing();
  const double inv_h2 = 1.0 / (h * h);
  if (g.mode() == GridMode::cartesian) {
    const std::size_t n = static_cast<std::size_t>(g.n());
    s.diag = -inv_h2;
    const std::size_t nb[4] = {i - 1, i + 1, i - n, i + n};
    for (int k = 0; k < 4; ++k) {
      s.nb[k] = nb[k];
      s.coeff[k] = 0.25 * inv_h2;
    }
  } else if (i == 0) {
    s.diag = -inv_h2;
    s.nb[0] = 1;
    s.coeff[0] = inv_h2;
  } else {
    const double rho = g.radius(i);
    s.diag = -0.5 * inv_h2;
    s.nb[0] = i + 1;
    s.coeff[0] = 0.25 * (inv_h2 + 1.0 / (2.0 * h * rho));
    s.nb[1] = i - 1;
    s.coeff[1] = 0.25 * (inv_h2 - 1.0 / (2.0 * h * rho));
  }
  return s;
}

struct ActiveSet {
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> index;  // grid node -> position in nodes, or npos

  static ActiveSet from_mask(const Mask& mask) {
    ActiveSet a;
    a.index.assign(mask.size(), Grid::npos);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) {
        a.index[i] = a.nodes.size();
        a.nodes.push_back(i);
      }
    }
    return a;
  }
};

// Residual at active nodes, node-major. Returns the sup-norm (inf if non-finite).
double residual_vector(std::span<const Field> w, const Field& q, const ActiveSet& act, Eigen::VectorXd& out) {
  const std::size_t m = w.size();
  out.resize(static_cast<Eigen::Index>(act.nodes.size() * m));
  double norm = 0.0;
  for (std::size_t k = 0; k < act.nodes.size(); ++k) {
    const std::size_t i = act.nodes[k];
    const double v0 = v0_at(w, q, i);
    for (std::size_t j = 0; j < m; ++j) {
      const double below = j == 0 ? v0 : std::exp(w[j - 1][i]);
      const double above = j + 1 == m ? v0 : std::exp(w[j + 1][i]);
      const double value = 0.25 * laplacian_at(w[j], i) - (2.0 * std::exp(w[j][i]) - below - above);
      out[static_cast<Eigen::Index>(k * m + j)] = value;
      if (!std::isfinite(value)) {
        norm = std::numeric_limits<double>::infinity();
      } else {
        norm = std::max(norm, std::abs(value));
      }
    }
  }
  return norm;
}

Eigen::SparseMatrix<double> assemble(std::span<const Field> w, const Field& q, const ActiveSet& act) {
  const Grid& g = q.grid();
  const std::size_t m = w.size();
  const auto size = static_cast<Eigen::Index>(act.nodes.size() * m);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(act.nodes.size() * m * (5 + m));
  for (std::size_t k = 0; k < act.nodes.size(); ++k) {
    const std::size_t i = act.nodes[k];
    const Stencil st = quarter_laplacian_stencil(g, i);
    const double v0 = v0_at(w, q, i);
    for (std::size_t j = 0; j < m; ++j) {
      const auto row = static_cast<int>(k * m + j);
      double diag = st.diag - 2.0 * std::exp(w[j][i]);
      for (int s = 0; s < 4; ++s) {
        if (st.nb[s] == Grid::npos) continue;
        const std::size_t col_node = act.index[st.nb[s]];
        if (col_node != Grid::npos) triplets.emplace_back(row, static_cast<int>(col_node * m + j), st.coeff[s]);
      }
      if (j > 0) triplets.emplace_back(row, static_cast<int>(k * m + j - 1), std::exp(w[j - 1][i]));
      if (j + 1 < m) triplets.emplace_back(row, static_cast<int>(k * m + j + 1), std::exp(w[j + 1][i]));
      // d V_0 / d w_l = -V_0 for every l; V_0 enters row 1 and row r-1 (twice for r = 2).
      const int v0_rows = (j == 0 ? 1 : 0) + (j + 1 == m ? 1 : 0);
      if (v0 != 0.0 && v0_rows > 0) {
        for (std::size_t l = 0; l < m; ++l) {
          const double value = -v0 * v0_rows;
          if (l == j) {
            diag += value;
          } else {
            triplets.emplace_back(row, static_cast<int>(k * m + l), value);
          }
        }
      }
      triplets.emplace_back(row, row, diag);
    }
  }
  Eigen::SparseMatrix<double> matrix(size, size);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  matrix.makeCompressed();
  return matrix;
}

bool use_direct(const SolverConfig& config, const Grid& grid) {
  switch (config.linear_solver) {
    case LinearSolverKind::direct: return true;
    case LinearSolverKind::iterative: return false;
    case LinearSolverKind::automatic: break;
  }
  return grid.n() <= 257 || grid.mode() == GridMode::radial;
}

struct NewtonOutcome {
  bool converged = false;
  double norm = 0.0;
  int iterations = 0;
};

// Damped Newton on the active nodes. `w` is updated in place; on failure it holds
// the last accepted iterate.
NewtonOutcome newton(std::vector<Field>& w, const Field& q, const ActiveSet& act, double tol,
                     const SolverConfig& config, std::vector<double>& history) {
  const std::size_t m = w.size();
  NewtonOutcome out;
  Eigen::VectorXd residual;
  out.norm = residual_vector(w, q, act, residual);
  if (act.nodes.empty()) {
    out.converged = true;
    return out;
  }
  const bool direct = use_direct(config, q.grid());
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool pattern_ready = false;
  std::vector<Field> trial = w;
  Eigen::VectorXd trial_residual;

  while (out.norm > tol) {
    if (out.iterations >= config.max_newton || !std::isfinite(out.norm)) return out;
    const Eigen::SparseMatrix<double> jac = assemble(w, q, act);
    Eigen::VectorXd step;
    if (direct) {
      if (!pattern_ready) {
        lu.analyzePattern(jac);
        pattern_ready = true;
      }
      lu.factorize(jac);
      if (lu.info() != Eigen::Success) {
        log::debug("newton: factorization failed");
        return out;
      }
      step = lu.solve(-residual);
    } else {
      Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>> iterative;
      iterative.setTolerance(1e-13);
      iterative.setMaxIterations(20000);
      iterative.compute(jac);
      step = iterative.solve(-residual);
    }
    if (!step.allFinite()) return out;

    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= config.max_halvings; ++halving) {
      for (std::size_t j = 0; j < m; ++j) trial[j] = w[j];
      for (std::size_t k = 0; k < act.nodes.size(); ++k) {
        for (std::size_t j = 0; j < m; ++j) {
          trial[j][act.nodes[k]] += alpha * step[static_cast<Eigen::Index>(k * m + j)];
        }
      }
      const double trial_norm = residual_vector(trial, q, act, trial_residual);
      if (std::isfinite(trial_norm) && trial_norm <= (1.0 - 1e-4 * alpha) * out.norm) {
        std::swap(w, trial);
        std::swap(residual, trial_residual);
        out.norm = trial_norm;
        accepted = true;
        break;
      }
      alpha *= config.damping;
    }
    if (!accepted) {
      log::debug("newton: line search stalled at residual ", out.norm);
      return out;
    }
    ++out.iterations;
    history.push_back(out.norm);
    log::debug("newton: iteration ", out.iterations, " step ", alpha, " residual ", out.norm);
  }
  out.converged = true;
  return out;
}

Field scaled(const Field& q, double s) {
  Field out = q;
  for (double& v : out.values()) v *= s;
  return out;
}

// Newton on the full weight; falls back to continuation Q_s = s Q from `start`.
int solve_stage(std::vector<Field>& w, const Field& q, const ActiveSet& act, const SolverConfig& config,
                std::vector<double>& history) {
  const std::vector<Field> start = w;
  NewtonOutcome direct = newton(w, q, act, config.tolerance, config, history);
  if (direct.converged) return direct.iterations;
  int iterations = direct.iterations;

  log::info("newton stalled at residual ", direct.norm, "; continuing in weight amplitude");
  w = start;
  const double base = 1.0 / config.continuation_steps;
  double s = 0.0;
  double ds = base;
  const double min_ds = base / 1024.0;
  constexpr double kStageTol = 1e-6;
  while (s < 1.0) {
    const double next = std::min(1.0, s + ds);
    const bool last = next >= 1.0;
    std::vector<Field> saved = w;
    NewtonOutcome stage = newton(w, scaled(q, next), act, last ? config.tolerance : std::max(kStageTol, config.tolerance),
                                 config, history);
    iterations += stage.iterations;
    if (stage.converged) {
      log::debug("continuation: s = ", next, " converged in ", stage.iterations);
      s = next;
      ds = std::min(base, 2.0 * ds);
      continue;
    }
    w = std::move(saved);
    ds *= 0.5;
    if (ds < min_ds) {
      throw ConvergenceError("Newton did not converge after continuation (stuck at s = " + std::to_string(s) +
                                 ", residual " + std::to_string(stage.norm) + ")",
                             history);
    }
  }
  return iterations;
}

void apply_model_data(std::vector<Field>& w, const Grid& grid, const Mask& fixed) {
  const int r = static_cast<int>(w.size()) + 1;
  const auto lambda = lambda_coefficients(r);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!fixed[i]) continue;
    const double wp = poincare_log_density(grid.data_radius(i));
    for (std::size_t j = 0; j < w.size(); ++j) w[j][i] = std::log(lambda[j]) + wp;
  }
}

void apply_flat_data(std::vector<Field>& w, const Grid& grid, const Field& q) {
  const int r = static_cast<int>(w.size()) + 1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.is_interior(i)) continue;
    double value = 0.0;
    if (q[i] > 0.0) {
      value = std::log(q[i]) / r;
    } else if (grid.is_ring(i)) {
      throw StrategyError("weight_flat needs Q > 0 on the boundary ring; Q = 0 at (" + std::to_string(grid.x(i)) +
                          ", " + std::to_string(grid.y(i)) + ")");
    }
    // Nodes outside every stencil keep 0 when Q vanishes there; they never enter the system.
    for (Field& f : w) f[i] = value;
  }
}

std::vector<Field> initial_fields(const GridPtr& grid, int r, const Field& q, const SolverConfig& config) {
  InitialGuess guess = config.initial_guess;
  if (guess == InitialGuess::automatic) {
    guess = config.boundary == BoundaryStrategy::weight_flat ? InitialGuess::flat : InitialGuess::model;
  }
  switch (guess) {
    case InitialGuess::model: return model_fields(grid, r);
    case InitialGuess::flat: {
      double top = 0.0;
      for (double v : q.values()) top = std::max(top, v);
      std::vector<Field> out(static_cast<std::size_t>(r - 1), Field(grid));
      if (top == 0.0) return out;
      const double floor = 1e-12 * top;
      for (std::size_t i = 0; i < grid->size(); ++i) {
        const double value = std::log(std::max(q[i], floor)) / r;
        for (Field& f : out) f[i] = value;
      }
      return out;
    }
    case InitialGuess::provided: {
      if (config.provided.size() != static_cast<std::size_t>(r - 1)) {
        throw ConfigurationError("provided", "needs exactly r-1 initial fields");
      }
      std::vector<Field> out;
      for (const Field& f : config.provided) {
        require_on_grid(f, *grid);
        if (!f.all_finite()) throw ValidationError("provided initial guess must be finite");
        out.emplace_back(grid, std::vector<double>(f.values().begin(), f.values().end()));
      }
      return out;
    }
    case InitialGuess::automatic: break;
  }
  throw InternalError("unresolved initial guess");
}

void finalize(TodaSolution& sol) {
  sol.v0 = degenerate_density(sol.w, sol.q);
  sol.residual_sup = residual_sup_norm(sol.w, sol.q);
}

}  // namespace

Field degenerate_density(std::span<const Field> w, const Field& q) {
  require_system(w, q);
  Field out(q.grid_ptr());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = v0_at(w, q, i);
  return out;
}

std::vector<Field> toda_residual(std::span<const Field> w, const Field& q) {
  require_system(w, q);
  const ActiveSet act = ActiveSet::from_mask(q.grid().interior_mask());
  Eigen::VectorXd vec;
  residual_vector(w, q, act, vec);
  const std::size_t m = w.size();
  std::vector<Field> out(m, Field(q.grid_ptr()));
  for (std::size_t k = 0; k < act.nodes.size(); ++k) {
    for (std::size_t j = 0; j < m; ++j) out[j][act.nodes[k]] = vec[static_cast<Eigen::Index>(k * m + j)];
  }
  return out;
}

double residual_sup_norm(std::span<const Field> w, const Field& q) {
  require_system(w, q);
  const ActiveSet act = ActiveSet::from_mask(q.grid().interior_mask());
  Eigen::VectorXd vec;
  return residual_vector(w, q, act, vec);
}

TodaJacobian::TodaJacobian(std::vector<Field> w, Field q) : w_(std::move(w)), q_(std::move(q)) {
  require_system(w_, q_);
  v0_ = degenerate_density(w_, q_);
  matrix_ = assemble(w_, q_, ActiveSet::from_mask(q_.grid().interior_mask()));
}

std::vector<Field> TodaJacobian::apply(std::span<const Field> v) const {
  const std::size_t m = w_.size();
  if (v.size() != m) throw ShapeError("direction needs r-1 fields");
  for (const Field& f : v) require_same_grid(f, q_);
  std::vector<Field> out(m, Field(q_.grid_ptr()));
  for (std::size_t i : q_.grid().interior_nodes()) {
    double sum_v = 0.0;
    for (const Field& f : v) sum_v += f[i];
    const double dv0 = -v0_[i] * sum_v;
    for (std::size_t j = 0; j < m; ++j) {
      const double d_below = j == 0 ? dv0 : std::exp(w_[j - 1][i]) * v[j - 1][i];
      const double d_above = j + 1 == m ? dv0 : std::exp(w_[j + 1][i]) * v[j + 1][i];
      out[j][i] = 0.25 * laplacian_at(v[j], i) - 2.0 * std::exp(w_[j][i]) * v[j][i] + d_below + d_above;
    }
  }
  return out;
}

TodaJacobian toda_jacobian(std::span<const Field> w, const Field& q) {
  return TodaJacobian(std::vector<Field>(w.begin(), w.end()), q);
}

TodaSolution solve_toda(const WeightDensity& weight, const GridPtr& grid, const SolverConfig& config) {
  validate(config);
  validate(weight);
  const int r = weight.r;
  TodaSolution sol;
  sol.grid = grid;
  sol.r = r;
  sol.weight = weight;
  sol.boundary = config.boundary;
  sol.q = evaluate_density(weight, grid);

  const bool model_data = config.boundary != BoundaryStrategy::weight_flat;
  if (model_data && !grid->inside_unit_disc()) {
    throw ConfigurationError("rho_max", "model boundary data needs rho_max < 1");
  }
  std::vector<Field> w = initial_fields(grid, r, sol.q, config);
  if (model_data) {
    apply_model_data(w, *grid, grid->boundary_mask());
  } else {
    apply_flat_data(w, *grid, sol.q);
  }

  if (config.boundary != BoundaryStrategy::exhaustion) {
    const ActiveSet act = ActiveSet::from_mask(grid->interior_mask());
    sol.iterations = solve_stage(w, sol.q, act, config, sol.residual_history);
  } else {
    std::vector<double> radii;
    for (double rho : {0.8, 0.85, 0.9}) {
      if (rho < grid->rho_max() - 1e-12) radii.push_back(rho);
    }
    radii.push_back(grid->rho_max());
    std::vector<Field> previous;
    Mask previous_mask;
    Mask compact;
    for (double rho : radii) {
      const bool last = rho == radii.back();
      const Mask mask = last ? grid->interior_mask() : grid->subdisc_interior_mask(rho);
      Mask fixed(grid->size(), 0);
      for (std::size_t i = 0; i < grid->size(); ++i) fixed[i] = mask[i] ? 0 : 1;
      if (previous.empty()) {
        apply_model_data(w, *grid, fixed);
      } else {
        // Annulus between the stages restarts from model data; the inner disc is warm.
        Mask annulus(grid->size(), 0);
        for (std::size_t i = 0; i < grid->size(); ++i) annulus[i] = previous_mask[i] ? 0 : 1;
        apply_model_data(w, *grid, annulus);
      }
      const ActiveSet act = ActiveSet::from_mask(mask);
      sol.iterations += solve_stage(w, sol.q, act, config, sol.residual_history);
      if (!previous.empty()) {
        double drift = 0.0;
        for (std::size_t i = 0; i < grid->size(); ++i) {
          if (!compact[i]) continue;
          for (std::size_t j = 0; j < w.size(); ++j) drift = std::max(drift, std::abs(w[j][i] - previous[j][i]));
        }
        sol.exhaustion_drift.push_back(drift);
        log::info("exhaustion: rho ", rho, " drift ", drift);
      }
      sol.exhaustion_radii.push_back(rho);
      if (previous.empty()) compact = mask;
      previous = w;
      previous_mask = mask;
    }
  }

  sol.w = std::move(w);
  finalize(sol);
  log::info("solve: r = ", r, " n = ", grid->n(), " iterations ", sol.iterations, " residual ", sol.residual_sup);
  return sol;
}

double recompute_residual(const TodaSolution& sol) { return residual_sup_norm(sol.w, sol.q); }

double symmetry_defect(const TodaSolution& sol) {
  double worst = 0.0;
  const std::size_t m = sol.w.size();
  for (std::size_t j = 0; j < m; ++j) {
    const Field& a = sol.w[j];
    const Field& b = sol.w[m - 1 - j];
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

std::vector<Field> recover_diagonal_metric(const TodaSolution& sol) {
  const std::size_t r = static_cast<std::size_t>(sol.r);
  std::vector<Field> eta(r, Field(sol.grid));
  for (std::size_t i = 0; i < sol.grid->size(); ++i) {
    // Partial sums c_k = w_1 + ... + w_{k-1}; eta_k = eta_1 + c_k with sum eta = 0.
    double partial = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      if (k > 0) partial += sol.w[k - 1][i];
      total += partial;
      eta[k][i] = partial;
    }
    const double first = -total / static_cast<double>(r);
    for (std::size_t k = 0; k < r; ++k) eta[k][i] += first;
  }
  return eta;
}

Field energy_density(const TodaSolution& sol) {
  Field out = sol.v0;
  for (const Field& f : sol.w) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += std::exp(f[i]);
  }
  return out;
}

TodaSolution make_solution(const WeightDensity& weight, const GridPtr& grid, BoundaryStrategy boundary,
                           std::vector<Field> w) {
  validate(weight);
  if (w.size() != static_cast<std::size_t>(weight.r - 1)) throw ShapeError("solution needs r-1 fields");
  TodaSolution sol;
  sol.grid = grid;
  sol.r = weight.r;
  sol.weight = weight;
  sol.boundary = boundary;
  sol.q = evaluate_density(weight, grid);
  for (Field& f : w) {
    require_on_grid(f, *grid);
    sol.w.emplace_back(grid, std::vector<double>(f.values().begin(), f.values().end()));
  }
  finalize(sol);
  return sol;
}

}  // namespace toda
