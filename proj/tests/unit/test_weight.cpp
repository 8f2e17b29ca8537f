#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "support/gen.hpp"
#include "support/oracles.hpp"
#include "toda/error.hpp"
#include "toda/weight.hpp"

using namespace toda;

TEST_CASE("lambda coefficients") {
  CHECK(lambda_coefficients(2) == std::vector<double>{1});
  CHECK(lambda_coefficients(3) == std::vector<double>{2, 2});
  CHECK(lambda_coefficients(4) == std::vector<double>{3, 4, 3});
  CHECK_THROWS_AS(lambda_coefficients(1), DomainError);
}

TEST_CASE("lambda symmetry and Cartan identity for r <= 64") {
  for (int r = 2; r <= 64; ++r) {
    const auto lambda = lambda_coefficients(r);
    REQUIRE(lambda.size() == static_cast<std::size_t>(r - 1));
    auto at = [&](int j) { return j == 0 || j == r ? 0.0 : lambda[static_cast<std::size_t>(j - 1)]; };
    for (int j = 1; j < r; ++j) {
      CHECK(at(j) > 0.0);
      CHECK(at(j) == at(r - j));
      CHECK(2.0 * at(j) - at(j - 1) - at(j + 1) == 2.0);
    }
  }
}

TEST_CASE("polynomial evaluation") {
  const WeightDensity z = polynomial_weight(2, {0.0, 1.0});
  CHECK(evaluate_at(z, 0.5, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(evaluate_at(polynomial_weight(2, {0.0, 1.0}, 2.0), 0.5, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(evaluate_at(z, 0.3, 0.4) == doctest::Approx(0.25).epsilon(1e-15));
  // |z^2 - 1/4| vanishes exactly at the zeros.
  const WeightDensity q2 = polynomial_weight(3, {-0.25, 0.0, 1.0});
  CHECK(evaluate_at(q2, 0.5, 0.0) == 0.0);
  CHECK(evaluate_at(q2, -0.5, 0.0) == 0.0);
  const auto zeros = polynomial_zeros(q2);
  REQUIRE(zeros.size() == 2);
  CHECK(zeros[0].real() == doctest::Approx(-0.5));
  CHECK(zeros[1].real() == doctest::Approx(0.5));
}

TEST_CASE("zero weight evaluates to the zero field") {
  const GridPtr g = build_grid(GridMode::cartesian, 17, 0.9);
  const Field q = evaluate_density(zero_weight(3), g);
  for (double v : q.values()) CHECK(v == 0.0);
  CHECK(is_identically_zero(zero_weight(3)));
  CHECK(is_identically_zero(constant_weight(3, 0.0)));
  CHECK_FALSE(is_identically_zero(constant_weight(3, 1e-300)));
}

TEST_CASE("invalid weights are rejected") {
  const GridPtr g = build_grid(GridMode::cartesian, 9, 0.9);
  CHECK_THROWS_AS(evaluate_density(polynomial_weight(2, {}), g), ValidationError);
  CHECK_THROWS_AS(evaluate_density(sampled_weight(2, std::vector<double>(81, -1.0)), g), ValidationError);
  CHECK_THROWS_AS(evaluate_density(sampled_weight(2, std::vector<double>(80, 1.0)), g), ShapeError);
  CHECK_THROWS_AS(evaluate_density(constant_weight(2, -1.0), g), ValidationError);
  CHECK_THROWS_AS(validate(zero_weight(1)), DomainError);
  CHECK_THROWS_AS(evaluate_at(sampled_weight(2, std::vector<double>(81, 1.0)), 0, 0), DomainError);
  CHECK_THROWS_AS(evaluate_density(polynomial_weight(2, {1.0, 1.0}), build_grid(GridMode::radial, 9, 0.9)),
                  DomainError);
}

TEST_CASE("radial profile interpolates linearly") {
  const WeightDensity w = radial_weight(2, {1.0, 3.0, 5.0}, 1.0);
  CHECK(evaluate_at(w, 0.25, 0.0) == doctest::Approx(2.0));
  CHECK(evaluate_at(w, 0.0, 0.75) == doctest::Approx(4.0));
  CHECK_THROWS_AS(evaluate_at(w, 2.0, 0.0), DomainError);
}

TEST_CASE("scale_weight") {
  const GridPtr g = build_grid(GridMode::cartesian, 17, 0.9);
  const WeightDensity q = polynomial_weight(3, {0.1, 0.0, 1.0});
  const Field base = evaluate_density(q, g);
  const Field same = evaluate_density(scale_weight(q, 1.0), g);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(same[i] == base[i]);

  const WeightDensity zero = scale_weight(zero_weight(2), 7.0);
  CHECK(zero.kind == WeightKind::zero);
  CHECK(is_identically_zero(zero));

  CHECK(evaluate_at(scale_weight(polynomial_weight(2, {0.0, 0.0, 1.0}), 3.0), 1.0, 0.0) ==
        doctest::Approx(9.0).epsilon(1e-15));
  CHECK(evaluate_at(scale_weight(constant_weight(2, 2.0), 0.5), 0.3, 0.1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(scale_weight(q, 0.0), DomainError);
  CHECK_THROWS_AS(scale_weight(q, -1.0), DomainError);
}

TEST_CASE("model constants: small r") {
  for (double beta : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
    CHECK(model_constants(2, beta).entropy == 0.0);
    CHECK(model_constants(3, beta).entropy == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  }
  const double s4 = -(0.6 * std::log(0.3) + 0.4 * std::log(0.4));
  CHECK(model_constants(4, 1.0).entropy == doctest::Approx(s4).epsilon(1e-14));
  CHECK(s4 == doctest::Approx(1.088900).epsilon(1e-6));
  CHECK_THROWS_AS(model_constants(4, 0.0), DomainError);
  CHECK_THROWS_AS(model_constants(1, 1.0), DomainError);
}

TEST_CASE("model constants at beta = 1") {
  const ModelConstants mc = model_constants(4, 1.0);
  REQUIRE(mc.c_beta.has_value());
  REQUIRE(mc.d_beta.has_value());
  CHECK(std::abs(*mc.c_beta - 1.0 / 6.0) < 1e-10);
  CHECK(std::abs(*mc.d_beta + 5.0 / 36.0) < 1e-10);
  CHECK(std::abs(mc.entropy_limit - (std::log(6.0) - 5.0 / 3.0)) < 1e-9);
  CHECK(mc.lambda == std::vector<double>{3, 4, 3});
}

TEST_CASE("beta integrals against Gamma and digamma") {
  for (double beta : {-0.9, -0.75, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0, 3.5, 7.0}) {
    INFO("beta = ", beta);
    CHECK(std::abs(beta_integral_c(beta) - oracle::beta_integral_c(beta)) < 1e-10);
    CHECK(std::abs(beta_integral_d(beta) - oracle::beta_integral_d(beta)) < 1e-10);
  }
  CHECK_THROWS_AS(beta_integral_c(-1.0), DomainError);
  CHECK_THROWS_AS(beta_integral_d(-1.5), DomainError);
}

TEST_CASE("entropy limit is -infinity for beta <= -1") {
  for (double beta : {-1.0, -2.0}) {
    const ModelConstants mc = model_constants(5, beta);
    CHECK_FALSE(mc.c_beta.has_value());
    CHECK_FALSE(mc.d_beta.has_value());
    CHECK(mc.entropy_limit == -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("model entropy stays below log r") {
  for (double beta : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
    for (int r = 2; r <= 200; ++r) {
      const double s = model_entropy(r, beta);
      CHECK(s < std::log(static_cast<double>(r)));
      CHECK(s == doctest::Approx(oracle::model_entropy(r, beta)).epsilon(1e-12));
    }
  }
}

TEST_CASE("S_model - log r approaches the limit monotonically at beta = 1") {
  const double limit = std::log(6.0) - 5.0 / 3.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int r : {100, 500, 2000}) {
    const double gap = std::abs(model_entropy(r, 1.0) - std::log(static_cast<double>(r)) - limit);
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(previous < 0.02);
}

TEST_CASE("S_model - log r tends to the differential entropy of Beta(beta + 1, beta + 1)") {
  for (double beta : {0.5, 1.0, 2.0}) {
    const double a = beta + 1.0;
    const double h = std::log(boost::math::beta(a, a)) - 2.0 * (a - 1.0) * boost::math::digamma(a) +
                     2.0 * (a - 1.0) * boost::math::digamma(2.0 * a);
    const double s = model_entropy(4000, beta) - std::log(4000.0);
    CHECK(std::abs(s - h) < 0.01);
    // The reported limit 2 beta d/c - log c has the opposite sign.
    CHECK(model_constants(4000, beta).entropy_limit == doctest::Approx(-h).epsilon(1e-9));
  }
  CHECK(std::log(6.0) - 5.0 / 3.0 > 0.0);
}

TEST_CASE("scale composition") {
  testing::for_all(50, 3, [](testing::Gen& gen) {
    const int r = gen.integer(2, 8);
    WeightDensity w;
    switch (gen.integer(0, 3)) {
      case 0: w = zero_weight(r); break;
      case 1: w = constant_weight(r, gen.log_uniform(1e-3, 1e3)); break;
      case 2: w = polynomial_weight(r, {gen.in_disc(1.0), gen.in_disc(1.0), gen.in_disc(1.0)}, gen.uniform(0.1, 3)); break;
      default: w = radial_weight(r, {gen.uniform(0, 2), gen.uniform(0, 2), gen.uniform(0, 2)}, 1.0); break;
    }
    const double a = gen.log_uniform(0.05, 20), b = gen.log_uniform(0.05, 20);
    const WeightDensity ab = scale_weight(scale_weight(w, a), b);
    const WeightDensity direct = scale_weight(w, a * b);
    for (int k = 0; k < 20; ++k) {
      const auto z = gen.in_disc(0.99);
      const double u = evaluate_at(ab, z.real(), z.imag());
      const double v = evaluate_at(direct, z.real(), z.imag());
      CHECK(std::abs(u - v) <= 1e-12 * std::max(std::abs(v), std::numeric_limits<double>::min()));
      CHECK(u >= 0.0);
    }
  });
}
