#include "toda/thermo.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "toda/error.hpp"
#include "toda/numerics.hpp"

namespace toda {

std::string_view to_string(Reference ref) { return ref == Reference::flat ? "flat" : "poincare"; }

Reference reference_from_string(std::string_view name) {
  if (name == "flat") return Reference::flat;
  if (name == "poincare") return Reference::poincare;
  throw ConfigurationError("reference", "unknown reference '" + std::string(name) + "'");
}

double reference_log_density(const Grid& grid, std::size_t node, Reference ref) {
  if (ref == Reference::flat) return 0.0;
  if (!grid.inside_unit_disc()) {
    throw ConfigurationError("reference", "the Poincare reference needs a grid inside the unit disc");
  }
  return poincare_log_density(grid.data_radius(node));
}

namespace {

void require_beta(double beta) {
  if (beta == 0.0 || !std::isfinite(beta)) throw DomainError("beta must be a nonzero finite number");
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

void slot_logits(const TodaSolution& sol, std::size_t node, double beta, std::vector<double>& out) {
  const std::size_t r = static_cast<std::size_t>(sol.r);
  out.resize(r);
  double sum_w = 0.0;
  for (std::size_t j = 1; j < r; ++j) {
    const double w = sol.w[j - 1][node];
    sum_w += w;
    out[j] = beta * w;
  }
  // log V_0 = log Q - sum w, kept finite even where the product V_0 underflows.
  out[0] = sol.q[node] > 0.0 ? beta * (std::log(sol.q[node]) - sum_w) : kNegInf;
}

std::vector<Field> distribution(const TodaSolution& sol, double beta) {
  require_beta(beta);
  std::vector<Field> p(static_cast<std::size_t>(sol.r), Field(sol.grid));
  std::vector<double> logits, probs;
  for (std::size_t i = 0; i < sol.grid->size(); ++i) {
    slot_logits(sol, i, beta, logits);
    const double lse = softmax(logits, probs);
    if (!std::isfinite(lse)) throw InternalError("every slot has zero weight at node " + std::to_string(i));
    for (std::size_t j = 0; j < probs.size(); ++j) p[j][i] = probs[j];
  }
  return p;
}

Field entropy_field(const TodaSolution& sol, double beta) {
  require_beta(beta);
  Field s(sol.grid);
  std::vector<double> logits;
  const double cap = std::log(static_cast<double>(sol.r));
  for (std::size_t i = 0; i < sol.grid->size(); ++i) {
    slot_logits(sol, i, beta, logits);
    s[i] = std::min(shannon_entropy_from_logits(logits), cap);
  }
  return s;
}

Field free_energy_field(const TodaSolution& sol, double beta, Reference ref) {
  require_beta(beta);
  Field f(sol.grid);
  std::vector<double> logits;
  for (std::size_t i = 0; i < sol.grid->size(); ++i) {
    const double log_ref = reference_log_density(*sol.grid, i, ref);
    slot_logits(sol, i, beta, logits);
    for (double& a : logits) a -= beta * log_ref;
    f[i] = -log_sum_exp(logits) / beta;
  }
  return f;
}

RedundancyResult redundancy(const TodaSolution& sol, double beta) {
  RedundancyResult out{entropy_field(sol, beta)};
  const double log_r = std::log(static_cast<double>(sol.r));
  for (double& v : out.field.values()) v = 1.0 - v / log_r;
  out.lower = inf_over(out.field, sol.grid->interior_mask());
  out.upper = sup_over(out.field, sol.grid->interior_mask());
  return out;
}

Field model_free_energy_field(const GridPtr& grid, int r, double beta, Reference ref) {
  require_beta(beta);
  if (!grid->inside_unit_disc()) {
    throw ConfigurationError("rho_max", "the model free energy lives on the unit disc");
  }
  const auto lambda = lambda_coefficients(r);
  std::vector<double> logits(lambda.size());
  for (std::size_t j = 0; j < lambda.size(); ++j) logits[j] = beta * std::log(lambda[j]);
  const double log_partition = log_sum_exp(logits);
  Field f(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double wp = poincare_log_density(grid->data_radius(i));
    f[i] = -(wp - reference_log_density(*grid, i, ref)) - log_partition / beta;
  }
  return f;
}

ThermoField compute_thermo(const TodaSolution& sol, double beta, Reference ref) {
  ThermoField out;
  out.grid = sol.grid;
  out.r = sol.r;
  out.beta = beta;
  out.reference = ref;
  out.p = distribution(sol, beta);
  out.free_energy = free_energy_field(sol, beta, ref);
  RedundancyResult red = redundancy(sol, beta);
  out.entropy = entropy_field(sol, beta);
  out.redundancy = std::move(red.field);
  out.lower_redundancy = red.lower;
  out.upper_redundancy = red.upper;
  return out;
}

}  // namespace toda
