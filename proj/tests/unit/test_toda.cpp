#include <doctest.h>

#include <cmath>
#include <limits>

#include "support/gen.hpp"
#include "support/oracles.hpp"
#include "toda/error.hpp"
#include "toda/toda.hpp"

using namespace toda;

namespace {

std::vector<Field> constant_fields(const GridPtr& g, int r, double value) {
  return std::vector<Field>(static_cast<std::size_t>(r - 1), Field(g, value));
}

/// Model fields sampled at the true node radius (no boundary projection).
std::vector<Field> exact_model(const GridPtr& g, int r) {
  std::vector<Field> out;
  for (double lambda : lambda_coefficients(r)) {
    out.push_back(sample(g, [&](double x, double y) {
      return std::log(lambda) + oracle::poincare_log_density(std::min(std::hypot(x, y), 0.95));
    }));
  }
  return out;
}

double sup_interior(const std::vector<Field>& fields, const Mask& mask) {
  double out = 0.0;
  for (const Field& f : fields) out = std::max(out, sup_norm(f, mask));
  return out;
}

}  // namespace

TEST_CASE("flat fields solve the system exactly") {
  const GridPtr g = build_grid(GridMode::cartesian, 17, 0.9);
  for (int r = 2; r <= 7; ++r) {
    const auto n = toda_residual(constant_fields(g, r, 0.0), Field(g, 1.0));
    REQUIRE(n.size() == static_cast<std::size_t>(r - 1));
    for (const Field& f : n) {
      for (double v : f.values()) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("Liouville residual at the origin vanishes at second order") {
  std::vector<double> res;
  for (int n : {33, 65, 129}) {
    const GridPtr g = build_grid(GridMode::cartesian, n, 0.9);
    const auto w = exact_model(g, 2);
    const auto nres = toda_residual(w, Field(g, 0.0));
    res.push_back(std::abs(nres[0][g->node(n / 2, n / 2)]));
  }
  for (std::size_t k = 0; k + 1 < res.size(); ++k) {
    const double p = oracle::order(res[k], res[k + 1]);
    INFO("order ", p);
    CHECK(p >= 1.7);
    CHECK(p <= 2.3);
  }
}

TEST_CASE("model residual for r = 4 vanishes at second order") {
  std::vector<double> res;
  const double collar = 3.0 * build_grid(GridMode::cartesian, 33, 0.9)->spacing();
  for (int n : {33, 65, 129}) {
    const GridPtr g = build_grid(GridMode::cartesian, n, 0.9);
    res.push_back(sup_interior(toda_residual(exact_model(g, 4), Field(g, 0.0)), g->collar_mask(collar)));
  }
  for (std::size_t k = 0; k + 1 < res.size(); ++k) {
    const double p = oracle::order(res[k], res[k + 1]);
    INFO("order ", p);
    CHECK(p >= 1.7);
    CHECK(p <= 2.3);
  }
}

TEST_CASE("residual input validation") {
  const GridPtr g = build_grid(GridMode::cartesian, 9, 0.9);
  auto w = constant_fields(g, 3, 0.0);
  w[1][40] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(toda_residual(w, Field(g, 1.0)), ValidationError);
  const GridPtr other = build_grid(GridMode::cartesian, 11, 0.9);
  CHECK_THROWS_AS(toda_residual(constant_fields(g, 3, 0.0), Field(other, 1.0)), ShapeError);
}

TEST_CASE("jacobian at the flat point: J 1 = -4 for r = 2") {
  const GridPtr g = build_grid(GridMode::cartesian, 17, 0.9);
  const TodaJacobian jac(constant_fields(g, 2, 0.0), Field(g, 1.0));
  const auto jv = jac.apply(constant_fields(g, 2, 1.0));
  for (std::size_t i : g->interior_nodes()) CHECK(jv[0][i] == doctest::Approx(-4.0).epsilon(1e-14));

  // The assembled matrix agrees with a forward difference of the residual.
  const Field q(g, 1.0);
  const double eps = 1e-6;
  const auto base = toda_residual(constant_fields(g, 2, 0.0), q);
  const auto shifted = toda_residual(constant_fields(g, 2, eps), q);
  for (std::size_t i : g->interior_nodes()) {
    CHECK((shifted[0][i] - base[0][i]) / eps == doctest::Approx(-4.0).epsilon(1e-5));
  }
}

TEST_CASE("matrix and matrix-free jacobian agree") {
  testing::for_all(6, 21, [](testing::Gen& gen) {
    const int r = gen.integer(2, 5);
    const GridPtr g = build_grid(GridMode::cartesian, gen.integer(9, 21), 0.9);
    std::vector<Field> w;
    for (int j = 1; j < r; ++j) w.push_back(gen.smooth_field(g, 0.5));
    Field q = gen.smooth_field(g, 1.0);
    for (double& v : q.values()) v = v * v;
    const TodaJacobian jac(w, q);
    std::vector<Field> v;
    for (int j = 1; j < r; ++j) {
      Field f(g);
      for (std::size_t i : g->interior_nodes()) f[i] = gen.uniform(-1, 1);
      v.push_back(f);
    }
    const auto jv = jac.apply(v);
    const std::size_t m = static_cast<std::size_t>(r - 1);
    Eigen::VectorXd x(static_cast<Eigen::Index>(g->interior_nodes().size() * m));
    for (std::size_t k = 0; k < g->interior_nodes().size(); ++k) {
      for (std::size_t j = 0; j < m; ++j) x[static_cast<Eigen::Index>(k * m + j)] = v[j][g->interior_nodes()[k]];
    }
    const Eigen::VectorXd y = jac.matrix() * x;
    for (std::size_t k = 0; k < g->interior_nodes().size(); ++k) {
      for (std::size_t j = 0; j < m; ++j) {
        const double a = y[static_cast<Eigen::Index>(k * m + j)];
        const double b = jv[j][g->interior_nodes()[k]];
        CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(b)));
      }
    }
  });
}

TEST_CASE("V_0 couplings vanish at Q = 0") {
  const GridPtr g = build_grid(GridMode::cartesian, 13, 0.9);
  const auto w = model_fields(g, 4);
  const TodaJacobian zero(w, Field(g, 0.0));
  const TodaJacobian positive(w, Field(g, 0.5));
  for (std::size_t k = 0; k < g->interior_nodes().size(); ++k) {
    const auto row1 = static_cast<Eigen::Index>(k * 3 + 0);
    const auto row3 = static_cast<Eigen::Index>(k * 3 + 2);
    // N_1 depends on w_3 and N_3 on w_1 only through V_0.
    CHECK(zero.matrix().coeff(row1, row3) == 0.0);
    CHECK(zero.matrix().coeff(row3, row1) == 0.0);
    CHECK(positive.matrix().coeff(row1, row3) < 0.0);
    CHECK(positive.matrix().coeff(row3, row1) < 0.0);
  }
}

TEST_CASE("flat solve for r = 3 takes at most two Newton steps") {
  const GridPtr g = build_grid(GridMode::cartesian, 33, 0.9);
  SolverConfig cfg;
  cfg.boundary = BoundaryStrategy::weight_flat;
  const TodaSolution sol = solve_toda(constant_weight(3, 1.0), g, cfg);
  CHECK(sol.residual_sup <= 1e-10);
  CHECK(sol.iterations <= 2);
  CHECK(sup_interior(sol.w, g->all_mask()) <= 1e-10);
}

TEST_CASE("weight_flat fails on a vanishing boundary weight") {
  const GridPtr g = build_grid(GridMode::cartesian, 17, 0.9);
  SolverConfig cfg;
  cfg.boundary = BoundaryStrategy::weight_flat;
  CHECK_THROWS_AS(solve_toda(zero_weight(2), g, cfg), StrategyError);
}

TEST_CASE("model data needs the unit disc") {
  CHECK_THROWS_AS(solve_toda(zero_weight(2), build_grid(GridMode::cartesian, 17, 1.5)), ConfigurationError);
  CHECK_THROWS_AS(model_fields(build_grid(GridMode::cartesian, 17, 1.0), 2), ConfigurationError);
}

TEST_CASE("solver configuration is validated") {
  SolverConfig cfg;
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(validate(cfg), ConfigurationError);
  cfg = {};
  cfg.max_newton = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigurationError);
}

TEST_CASE("non-convergence carries the residual history") {
  const GridPtr g = build_grid(GridMode::cartesian, 17, 0.9);
  SolverConfig cfg;
  cfg.tolerance = 1e-300;
  cfg.max_newton = 2;
  cfg.continuation_steps = 1;
  try {
    solve_toda(polynomial_weight(2, {0.0, 1.0}), g, cfg);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK_FALSE(e.residual_history().empty());
    for (double v : e.residual_history()) CHECK(std::isfinite(v));
  }
}

TEST_CASE("q = z, r = 2: converged with V_0 e^{-w_1} < 1") {
  const GridPtr g = build_grid(GridMode::cartesian, 33, 0.9);
  const TodaSolution sol = solve_toda(polynomial_weight(2, {0.0, 1.0}), g);
  CHECK(sol.residual_sup <= 1e-10);
  CHECK(std::abs(recompute_residual(sol) - sol.residual_sup) <= 1e-12);
  for (std::size_t i : g->interior_nodes()) CHECK(sol.v0[i] * std::exp(-sol.w[0][i]) < 1.0);
  // V_0 vanishes exactly where Q does.
  const std::size_t origin = g->node(16, 16);
  CHECK(sol.q[origin] == 0.0);
  CHECK(sol.v0[origin] == 0.0);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(sol.v0[i] >= 0.0);
    if (sol.q[i] > 0.0) CHECK(sol.v0[i] > 0.0);
  }
}

TEST_CASE("real symmetry of a solved r = 4 instance") {
  const GridPtr g = build_grid(GridMode::cartesian, 33, 0.9);
  const TodaSolution sol = solve_toda(polynomial_weight(4, {0.0, 1.0}), g);
  CHECK(symmetry_defect(sol) <= 1e-9);
  const auto eta = recover_diagonal_metric(sol);
  REQUIRE(eta.size() == 4);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(std::abs(eta[0][i] + eta[3][i]) <= 1e-9);
    CHECK(std::abs(eta[1][i] + eta[2][i]) <= 1e-9);
  }
}

TEST_CASE("diagonal metric recovery") {
  const GridPtr g = build_grid(GridMode::cartesian, 9, 0.9);
  SolverConfig cfg;
  cfg.boundary = BoundaryStrategy::weight_flat;
  const auto flat = recover_diagonal_metric(solve_toda(constant_weight(2, 1.0), g, cfg));
  for (const Field& e : flat) CHECK(sup_norm(e, g->all_mask()) <= 1e-12);

  const double c = 0.7;
  const TodaSolution constant = make_solution(constant_weight(2, 1.0), g, BoundaryStrategy::weight_flat,
                                              {Field(g, c)});
  const auto eta = recover_diagonal_metric(constant);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(eta[0][i] == doctest::Approx(-c / 2));
    CHECK(eta[1][i] == doctest::Approx(c / 2));
  }

  testing::for_all(10, 8, [&](testing::Gen& gen) {
    const int r = gen.integer(2, 7);
    std::vector<Field> w;
    for (int j = 1; j < r; ++j) w.push_back(gen.smooth_field(g));
    const auto e = recover_diagonal_metric(make_solution(constant_weight(r, 1.0), g, BoundaryStrategy::weight_flat, w));
    for (std::size_t i = 0; i < g->size(); ++i) {
      double sum = 0.0;
      for (const Field& f : e) sum += f[i];
      CHECK(std::abs(sum) <= 1e-12);
      for (int j = 1; j < r; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        CHECK(std::abs(e[ju][i] - e[ju - 1][i] - w[ju - 1][i]) <= 1e-12);
      }
    }
  });
}

TEST_CASE("energy density examples") {
  const GridPtr g = build_grid(GridMode::cartesian, 17, 0.9);
  SolverConfig cfg;
  cfg.boundary = BoundaryStrategy::weight_flat;
  const Field flat = energy_density(solve_toda(constant_weight(3, 1.0), g, cfg));
  for (double v : flat.values()) CHECK(v == doctest::Approx(3.0).epsilon(1e-10));

  const TodaSolution model = make_solution(zero_weight(2), g, BoundaryStrategy::model_poincare, model_fields(g, 2));
  CHECK(energy_density(model)[g->node(8, 8)] == 1.0);
}

TEST_CASE("exhaustion drift shrinks across the last stages") {
  // Stage radii differ by 0.05, so the grid must resolve that several times over.
  const GridPtr g = build_grid(GridMode::cartesian, 161, 0.95);
  SolverConfig cfg;
  cfg.boundary = BoundaryStrategy::exhaustion;
  const TodaSolution sol = solve_toda(polynomial_weight(2, {0.0, 1.0}), g, cfg);
  CHECK(sol.residual_sup <= 1e-10);
  CHECK(sol.exhaustion_radii == std::vector<double>{0.8, 0.85, 0.9, 0.95});
  REQUIRE(sol.exhaustion_drift.size() == 3);
  CHECK(sol.exhaustion_drift[2] < sol.exhaustion_drift[1]);
}

TEST_CASE("model solve matches the closed form to O(h^2)") {
  std::vector<double> errors;
  const double collar = 3.0 * build_grid(GridMode::cartesian, 33, 0.9)->spacing();
  for (int n : {33, 65}) {
    const GridPtr g = build_grid(GridMode::cartesian, n, 0.9);
    const TodaSolution sol = solve_toda(zero_weight(3), g);
    const auto model = model_fields(g, 3);
    double err = 0.0;
    for (std::size_t j = 0; j < 2; ++j) err = std::max(err, oracle::sup_diff(sol.w[j], model[j], g->collar_mask(collar)));
    errors.push_back(err);
  }
  const double p = oracle::order(errors[0], errors[1]);
  INFO("order ", p);
  CHECK(p >= 1.7);
  CHECK(p <= 2.3);
}
