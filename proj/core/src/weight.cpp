#include "toda/weight.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "toda/error.hpp"
#include "toda/numerics.hpp"
#include "toda/quadrature.hpp"

namespace toda {

std::string_view to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::zero: return "zero";
    case WeightKind::constant: return "constant";
    case WeightKind::polynomial: return "poly";
    case WeightKind::radial: return "radial";
    case WeightKind::samples: return "samples";
  }
  return "zero";
}

WeightKind weight_kind_from_string(std::string_view name) {
  if (name == "zero") return WeightKind::zero;
  if (name == "constant") return WeightKind::constant;
  if (name == "poly") return WeightKind::polynomial;
  if (name == "radial") return WeightKind::radial;
  if (name == "samples") return WeightKind::samples;
  throw ValidationError("unknown weight kind '" + std::string(name) + "'");
}

WeightDensity zero_weight(int r) {
  WeightDensity w;
  w.r = r;
  return w;
}

WeightDensity constant_weight(int r, double c) {
  WeightDensity w;
  w.kind = WeightKind::constant;
  w.r = r;
  w.c = c;
  validate(w);
  return w;
}

WeightDensity polynomial_weight(int r, std::vector<std::complex<double>> coeffs, double t) {
  WeightDensity w;
  w.kind = WeightKind::polynomial;
  w.r = r;
  w.t = t;
  w.coeffs = std::move(coeffs);
  validate(w);
  return w;
}

WeightDensity radial_weight(int r, std::vector<double> samples, double profile_rho_max) {
  WeightDensity w;
  w.kind = WeightKind::radial;
  w.r = r;
  w.samples = std::move(samples);
  w.profile_rho_max = profile_rho_max;
  validate(w);
  return w;
}

WeightDensity sampled_weight(int r, std::vector<double> samples) {
  WeightDensity w;
  w.kind = WeightKind::samples;
  w.r = r;
  w.samples = std::move(samples);
  validate(w);
  return w;
}

void validate(const WeightDensity& w) {
  if (w.r < 2) throw DomainError("weight order r must be >= 2");
  if (!(w.t > 0.0) || !std::isfinite(w.t)) throw DomainError("weight scale t must be positive");
  switch (w.kind) {
    case WeightKind::zero: break;
    case WeightKind::constant:
      if (!(w.c >= 0.0) || !std::isfinite(w.c)) throw ValidationError("constant weight must be finite and >= 0");
      break;
    case WeightKind::polynomial:
      if (w.coeffs.empty()) throw ValidationError("polynomial weight needs at least one coefficient");
      for (const auto& a : w.coeffs) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
          throw ValidationError("polynomial coefficients must be finite");
        }
      }
      break;
    case WeightKind::radial:
      if (w.samples.size() < 2) throw ValidationError("radial profile needs at least two samples");
      if (!(w.profile_rho_max > 0.0)) throw ValidationError("radial profile needs rho_max > 0");
      [[fallthrough]];
    case WeightKind::samples:
      for (double s : w.samples) {
        if (!std::isfinite(s)) throw ValidationError("weight samples must be finite");
        if (s < 0.0) throw ValidationError("weight samples must be nonnegative");
      }
      break;
  }
}

namespace {

std::complex<double> horner(const std::vector<std::complex<double>>& coeffs, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double profile_at(const WeightDensity& w, double rho) {
  const std::size_t last = w.samples.size() - 1;
  const double step = w.profile_rho_max / static_cast<double>(last);
  if (rho >= w.profile_rho_max) {
    if (rho > w.profile_rho_max * (1.0 + 1e-12)) {
      throw DomainError("radial profile does not cover rho = " + std::to_string(rho));
    }
    return w.samples[last];
  }
  const double s = rho / step;
  const std::size_t k = std::min(static_cast<std::size_t>(s), last - 1);
  const double frac = s - static_cast<double>(k);
  return (1.0 - frac) * w.samples[k] + frac * w.samples[k + 1];
}

std::size_t nonzero_terms(const WeightDensity& w) {
  return static_cast<std::size_t>(
      std::count_if(w.coeffs.begin(), w.coeffs.end(), [](std::complex<double> a) { return a != 0.0; }));
}

}  // namespace

double evaluate_at(const WeightDensity& w, double x, double y) {
  const double t2 = w.t * w.t;
  switch (w.kind) {
    case WeightKind::zero: return 0.0;
    case WeightKind::constant: return t2 * w.c;
    case WeightKind::polynomial: return t2 * std::norm(horner(w.coeffs, {x, y}));
    case WeightKind::radial: return t2 * profile_at(w, std::hypot(x, y));
    case WeightKind::samples: break;
  }
  throw DomainError("sampled weights can only be evaluated on their grid");
}

Field evaluate_density(const WeightDensity& w, const GridPtr& grid) {
  validate(w);
  if (grid->mode() == GridMode::radial && w.kind == WeightKind::polynomial && nonzero_terms(w) > 1) {
    throw DomainError("radial grids need a rotation-invariant weight; |q|^2 is not radial");
  }
  if (w.kind == WeightKind::samples) {
    if (w.samples.size() != grid->size()) {
      throw ShapeError("weight has " + std::to_string(w.samples.size()) + " samples for " +
                       std::to_string(grid->size()) + " nodes");
    }
    Field out(grid, w.samples);
    for (double& v : out.values()) v *= w.t * w.t;
    return out;
  }
  return sample(grid, [&](double x, double y) { return evaluate_at(w, x, y); });
}

WeightDensity scale_weight(const WeightDensity& w, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("scale factor t must be positive");
  WeightDensity out = w;
  if (out.kind != WeightKind::zero) out.t *= t;
  return out;
}

bool is_identically_zero(const WeightDensity& w) {
  switch (w.kind) {
    case WeightKind::zero: return true;
    case WeightKind::constant: return w.c == 0.0;
    case WeightKind::polynomial: return nonzero_terms(w) == 0;
    case WeightKind::radial:
    case WeightKind::samples:
      return std::all_of(w.samples.begin(), w.samples.end(), [](double s) { return s == 0.0; });
  }
  return false;
}

std::vector<std::complex<double>> polynomial_zeros(const WeightDensity& w) {
  if (w.kind != WeightKind::polynomial) return {};
  std::vector<std::complex<double>> a = w.coeffs;
  while (!a.empty() && a.back() == 0.0) a.pop_back();
  if (a.size() <= 1) return {};
  const int degree = static_cast<int>(a.size()) - 1;
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -a[i] / a[degree];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  const auto& ev = solver.eigenvalues();
  std::vector<std::complex<double>> zeros(ev.data(), ev.data() + ev.size());
  std::sort(zeros.begin(), zeros.end(), [](auto p, auto q) {
    return p.real() != q.real() ? p.real() < q.real() : p.imag() < q.imag();
  });
  return zeros;
}

bool bounded_by_construction(const WeightDensity& w) {
  return w.kind == WeightKind::zero || w.kind == WeightKind::constant || w.kind == WeightKind::polynomial;
}

std::vector<double> lambda_coefficients(int r) {
  if (r < 2) throw DomainError("lambda coefficients need r >= 2");
  std::vector<double> out(static_cast<std::size_t>(r - 1));
  for (int j = 1; j < r; ++j) out[j - 1] = static_cast<double>(j) * static_cast<double>(r - j);
  return out;
}

double model_entropy(int r, double beta) {
  if (beta == 0.0) throw DomainError("beta must be nonzero");
  const auto lambda = lambda_coefficients(r);
  std::vector<double> a(lambda.size());
  for (std::size_t j = 0; j < lambda.size(); ++j) a[j] = beta * std::log(lambda[j]);
  return shannon_entropy_from_logits(a);
}

namespace {

constexpr double kQuadTol = 1e-13;

// int_0^{1/2} s^beta g(s) ds where g is smooth on [0, 1/2] except for a possible
// log s factor. For -1 < beta < 0 the power singularity is removed with
// s = v^m, m = 1/(1+beta), which turns s^beta ds into m dv.
double half_integral(double beta, const std::function<double(double, double)>& g) {
  if (beta < 0.0) {
    const double m = 1.0 / (1.0 + beta);
    const double upper = std::pow(0.5, 1.0 / m);
    auto f = [&](double v) {
      const double log_s = m * std::log(v);
      return m * g(std::exp(log_s), log_s);
    };
    return quad::integrate(f, 0.0, upper, kQuadTol).value;
  }
  auto f = [&](double s) { return std::pow(s, beta) * g(s, std::log(s)); };
  return quad::integrate(f, 0.0, 0.5, kQuadTol).value;
}

void require_beta_integrable(double beta) {
  if (!(beta > -1.0)) throw DomainError("beta integrals diverge for beta <= -1");
}

}  // namespace

double beta_integral_c(double beta) {
  require_beta_integrable(beta);
  // Symmetric under s -> 1 - s.
  return 2.0 * half_integral(beta, [beta](double s, double) { return std::pow(1.0 - s, beta); });
}

double beta_integral_d(double beta) {
  require_beta_integrable(beta);
  // [0,1/2] carries log s; the mirrored half [1/2,1] becomes log(1-u) on [0,1/2].
  const double near_zero = half_integral(beta, [beta](double s, double log_s) { return std::pow(1.0 - s, beta) * log_s; });
  const double near_one =
      half_integral(beta, [beta](double u, double) { return std::pow(1.0 - u, beta) * std::log1p(-u); });
  return near_zero + near_one;
}

ModelConstants model_constants(int r, double beta) {
  if (beta == 0.0) throw DomainError("beta must be nonzero");
  ModelConstants out;
  out.r = r;
  out.lambda = lambda_coefficients(r);
  out.beta = beta;
  out.entropy = model_entropy(r, beta);
  if (beta > -1.0) {
    out.c_beta = beta_integral_c(beta);
    out.d_beta = beta_integral_d(beta);
    out.entropy_limit = 2.0 * beta * *out.d_beta / *out.c_beta - std::log(*out.c_beta);
  } else {
    out.entropy_limit = -std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace toda
