#pragma once

#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "toda/grid.hpp"
#include "toda/weight.hpp"

namespace toda::testing {

/// Seeded source of random test inputs.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  /// Uniform in log scale on [lo, hi], both positive.
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  template <typename T>
  const T& pick(const std::vector<T>& values) {
    return values[static_cast<std::size_t>(integer(0, static_cast<int>(values.size()) - 1))];
  }

  std::complex<double> in_disc(double radius) {
    const double rho = radius * std::sqrt(uniform(0.0, 1.0));
    const double angle = uniform(0.0, 2.0 * std::numbers::pi);
    return std::polar(rho, angle);
  }

  /// Logits with magnitudes up to `spread`; each entry is -infinity with probability p_empty
  /// (at least one entry stays finite).
  std::vector<double> logits(std::size_t n, double spread, double p_empty = 0.0) {
    std::vector<double> out(n);
    for (double& a : out) a = coin(p_empty) ? -std::numeric_limits<double>::infinity() : uniform(-spread, spread);
    out[static_cast<std::size_t>(integer(0, static_cast<int>(n) - 1))] = uniform(-spread, spread);
    return out;
  }

  /// Smooth random field: a few low-frequency trigonometric modes plus a quadratic.
  Field smooth_field(const GridPtr& grid, double amplitude = 1.0) {
    const double a = uniform(-1, 1), b = uniform(-1, 1), c = uniform(-1, 1);
    const double kx = uniform(0.5, 3.0), ky = uniform(0.5, 3.0), phase = uniform(0, 6.28);
    return sample(grid, [&](double x, double y) {
      return amplitude * (a * std::sin(kx * x + phase) * std::cos(ky * y) + b * x * y + c * (x * x - y * y));
    });
  }

  /// Polynomial q with a zero at `zero` times a random nonvanishing linear factor.
  WeightDensity polynomial_with_zero(int r, std::complex<double> zero) {
    const std::complex<double> a = in_disc(0.3);
    // (z - zero)(1 + a z) in ascending coefficients.
    return polynomial_weight(r, {-zero, 1.0 - zero * a, a});
  }

 private:
  std::mt19937_64 rng_;
};

/// Runs `body` on `cases` generators seeded from `seed`; the failing case index is
/// reported through doctest's INFO.
template <typename Body>
void for_all(int cases, std::uint64_t seed, Body&& body) {
  for (int k = 0; k < cases; ++k) {
    const std::uint64_t s = seed * 1000003u + static_cast<std::uint64_t>(k);
    INFO("property case ", k, " (generator seed ", s, ")");
    Gen gen(s);
    body(gen);
  }
}

}  // namespace toda::testing
