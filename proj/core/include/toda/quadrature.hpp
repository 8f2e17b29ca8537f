#pragma once

#include <functional>

namespace toda::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;   ///< Kronrod-Gauss error estimate (sum over subintervals)
  int evaluations = 0;
  bool converged = false;
};

/// Globally adaptive 7-point Gauss / 15-point Kronrod quadrature on [a, b].
///
/// Repeatedly bisects the subinterval with the largest error estimate until the
/// summed estimate drops below max(abs_tol, rel_tol |I|) or max_intervals is hit.
/// Nodes are interior to every subinterval, so integrable endpoint singularities
/// are never evaluated.
Result integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-12,
                 double rel_tol = 0.0, int max_intervals = 2000);

}  // namespace toda::quad
