#pragma once

#include "sbm/graph_model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace sbm {

/// Assignment weight used by the brute-force posterior.
///   TreeOnly:    prod_i gamma_{s_i} prod_{(ij) in E} c_{s_i s_j}
///   Poissonized: TreeOnly * prod_{i<j} exp(-c_{s_i s_j} / n)
///   Bernoulli:   prod_i gamma_{s_i} prod_E (c/n) prod_{not E} (1 - c/n)
enum class WeightModel { TreeOnly, Poissonized, Bernoulli };

std::string_view to_string(WeightModel model);
WeightModel parse_weight_model(std::string_view name);

class InstanceTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every assignment has zero weight (e.g. an odd cycle under a
/// zero-diagonal two-group affinity).
class ZeroEvidence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kMaxExactStates = 10'000'000;

struct ExactPosterior {
  Matrix marginals;  // q x n
  double log_evidence;
};

/// Enumerates all q^n assignments depth-first, accumulating in the log
/// domain. Refuses instances with q^n above `max_states`.
ExactPosterior exact_posterior(const Network& net, WeightModel model,
                               std::uint64_t max_states = kMaxExactStates);

inline Matrix exact_marginals(const Network& net, WeightModel model) {
  return exact_posterior(net, model).marginals;
}
inline double exact_log_evidence(const Network& net, WeightModel model) {
  return exact_posterior(net, model).log_evidence;
}

}  // namespace sbm
