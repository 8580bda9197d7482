#pragma once

#include "sbm/graph_model.hpp"

namespace sbm {

/// Per-node posterior from a bounded neighborhood. Column i is node i.
struct LocalPosterior {
  Matrix probs;
  int radius = 1;
};

/// Poisson-degree posterior Pr[s_i = a | d_i] ∝ gamma_a e^{-c_a} c_a^{d_i},
/// with 0^0 = 1. Throws InvalidParameter if a row has no support.
LocalPosterior degree_classifier(const Network& net, const GroupPrior& prior,
                                 const Vector& group_degrees);

/// Weak-structure messages gamma_a e^{-c_a} c_a^{d_i - 1}, one per node
/// (identical towards every neighbor). Isolated nodes get gamma_a e^{-c_a}.
Matrix first_order_messages(const Network& net, const GroupPrior& prior,
                            const Vector& group_degrees);

/// Posterior given the node's degree and its neighbors' degrees:
///   mu_a ∝ gamma_a e^{-c_a} prod_k sum_b gamma_b c_ab e^{-c_b} c_b^{d_k - 1}.
LocalPosterior radius2_classifier(const Network& net, const GroupPrior& prior,
                                  const AffinityMatrix& affinity, const Vector& group_degrees);

}  // namespace sbm
