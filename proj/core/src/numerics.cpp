#include "toda/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace toda {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_sum_exp(std::span<const double> logits) {
  double top = kNegInf;
  for (double a : logits) top = std::max(top, a);
  if (top == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double a : logits) {
    if (a != kNegInf) sum += std::exp(a - top);
  }
  return top + std::log(sum);
}

double softmax(std::span<const double> logits, std::vector<double>& out) {
  const double lse = log_sum_exp(logits);
  out.resize(logits.size());
  for (std::size_t j = 0; j < logits.size(); ++j) {
    out[j] = logits[j] == kNegInf ? 0.0 : std::exp(logits[j] - lse);
  }
  return lse;
}

double shannon_entropy_from_logits(std::span<const double> logits) {
  std::vector<double> p;
  const double lse = softmax(logits, p);
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] > 0.0) s -= p[j] * (logits[j] - lse);
  }
  return std::max(s, 0.0);
}

}  // namespace toda
