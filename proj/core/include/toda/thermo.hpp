#pragma once

#include <string_view>
#include <vector>

#include "toda/grid.hpp"
#include "toda/toda.hpp"

namespace toda {

/// Reference volume for the free energy: the flat frame (density 1) or the
/// Poincare metric (density (1 - |z|^2)^{-2}, unit-disc grids only).
enum class Reference { flat, poincare };

std::string_view to_string(Reference ref);
Reference reference_from_string(std::string_view name);

/// log of the reference density at a node. Throws ConfigurationError for the
/// Poincare reference on a grid that is not inside the unit disc.
double reference_log_density(const Grid& grid, std::size_t node, Reference ref);

/// Canonical-ensemble view of a solution at one inverse temperature.
///
/// Slot j = 0..r-1 has density D_j (D_0 = V_0, D_j = e^{w_j}) and weight D_j^beta.
/// Where V_0 = 0 slot 0 carries weight 0 for either sign of beta: 0^beta = 0 for
/// beta > 0, and the slot is dropped for beta < 0.
struct ThermoField {
  GridPtr grid;
  int r = 2;
  double beta = 1.0;
  Reference reference = Reference::flat;
  std::vector<Field> p;  ///< p_0..p_{r-1}
  Field entropy;         ///< nats
  Field free_energy;     ///< nats, reference-dependent
  Field redundancy;      ///< 1 - S / log r
  double lower_redundancy = 0.0;  ///< inf over interior nodes
  double upper_redundancy = 0.0;  ///< sup over interior nodes
};

/// Logits beta log D_j for slots 0..r-1 at one node (-infinity for an empty slot 0).
void slot_logits(const TodaSolution& sol, std::size_t node, double beta, std::vector<double>& out);

std::vector<Field> distribution(const TodaSolution& sol, double beta);
Field entropy_field(const TodaSolution& sol, double beta);

/// F = -(1/beta) log sum_j (D_j / D_ref)^beta via a shifted log-sum-exp.
Field free_energy_field(const TodaSolution& sol, double beta, Reference ref);

struct RedundancyResult {
  Field field;
  double lower = 0.0;
  double upper = 0.0;
};
RedundancyResult redundancy(const TodaSolution& sol, double beta);

/// Free energy of the closed-form model solution w_j = log lambda_j - 2 log(1 - |z|^2),
/// without solving anything. Unit-disc grids only.
Field model_free_energy_field(const GridPtr& grid, int r, double beta, Reference ref);

/// Everything above at once.
ThermoField compute_thermo(const TodaSolution& sol, double beta, Reference ref);

}  // namespace toda
