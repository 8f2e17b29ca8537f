#pragma once

#include <span>
#include <vector>

namespace toda {

/// log(sum_j exp(a_j)) with a max shift. Entries equal to -infinity contribute
/// nothing; an all -infinity input returns -infinity.
double log_sum_exp(std::span<const double> logits);

/// p_j = exp(a_j - lse(a)), written into `out` (resized). Returns lse(a).
double softmax(std::span<const double> logits, std::vector<double>& out);

/// -sum p log p of softmax(a), with 0 log 0 = 0, evaluated as
/// lse(a) - sum_j p_j a_j so that no probability is logged.
double shannon_entropy_from_logits(std::span<const double> logits);

}  // namespace toda
