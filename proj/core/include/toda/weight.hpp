#pragma once

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include "toda/grid.hpp"

namespace toda {

enum class WeightKind { zero, constant, polynomial, radial, samples };

std::string_view to_string(WeightKind kind);
WeightKind weight_kind_from_string(std::string_view name);

/// The weight datum Q = e^{r phi} >= 0, relative to the flat frame dz.
///
/// Every kind carries a scale t and evaluates to t^2 * base(z):
///   zero        base = 0                      (phi identically -infinity)
///   constant    base = c
///   polynomial  base = |q(z)|^2, q(z) = sum_k coeffs[k] z^k
///   radial      base = linear interpolation of `samples` on [0, profile_rho_max]
///   samples     base = samples[node], one value per grid node
struct WeightDensity {
  WeightKind kind = WeightKind::zero;
  int r = 2;
  double t = 1.0;
  double c = 0.0;
  std::vector<std::complex<double>> coeffs;
  std::vector<double> samples;
  double profile_rho_max = 0.0;
};

WeightDensity zero_weight(int r);
WeightDensity constant_weight(int r, double c);
WeightDensity polynomial_weight(int r, std::vector<std::complex<double>> coeffs, double t = 1.0);
WeightDensity radial_weight(int r, std::vector<double> samples, double profile_rho_max);
WeightDensity sampled_weight(int r, std::vector<double> samples);

/// Throws ValidationError / DomainError if the descriptor violates its invariants.
void validate(const WeightDensity& w);

/// Q at a point. Not available for the `samples` kind (throws DomainError).
double evaluate_at(const WeightDensity& w, double x, double y);

/// Q at every node of the grid. Radial grids require a rotation-invariant weight
/// (zero, constant, radial, or a polynomial with a single monomial).
Field evaluate_density(const WeightDensity& w, const GridPtr& grid);

/// Returns the weight with Q multiplied by t^2, i.e. phi shifted by (2/r) log t.
WeightDensity scale_weight(const WeightDensity& w, double t);

/// True when Q is identically zero, whatever the representation.
bool is_identically_zero(const WeightDensity& w);

/// Complex zeros of the polynomial (empty for other kinds or constant q).
std::vector<std::complex<double>> polynomial_zeros(const WeightDensity& w);

/// Whether Q is bounded on the disc by construction (zero, constant, polynomial).
bool bounded_by_construction(const WeightDensity& w);

/// lambda_j = j (r - j) for j = 1..r-1. Throws DomainError for r < 2.
std::vector<double> lambda_coefficients(int r);

/// Constants of the phi = -infinity model case for given r and beta.
struct ModelConstants {
  int r = 2;
  std::vector<double> lambda;
  double beta = 1.0;
  /// Entropy of the model distribution p_j proportional to lambda_j^beta, j = 1..r-1.
  double entropy = 0.0;
  /// Beta-function integrals; only defined for beta > -1.
  std::optional<double> c_beta;
  std::optional<double> d_beta;
  /// Limit of (entropy - log r) as r grows: 2 beta d/c - log c, or -infinity.
  double entropy_limit = 0.0;
};

/// Throws DomainError for r < 2 or beta == 0.
ModelConstants model_constants(int r, double beta);

/// The model entropy alone (no quadrature).
double model_entropy(int r, double beta);

/// int_0^1 s^beta (1-s)^beta ds and int_0^1 s^beta (1-s)^beta log s ds for beta > -1,
/// by adaptive Gauss-Kronrod to 1e-10 absolute.
double beta_integral_c(double beta);
double beta_integral_d(double beta);

}  // namespace toda
