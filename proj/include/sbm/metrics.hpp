#pragma once

#include "sbm/graph_model.hpp"

#include <span>

namespace sbm {

/// Most probable group; ties go to the lowest index.
int argmax_group(const Eigen::Ref<const Vector>& belief);

/// Fraction of nodes whose argmax marginal equals the planted label.
double overlap(const Matrix& marginals, std::span<const int> planted);

/// Mean posterior mass on the planted label.
double marginal_overlap(const Matrix& marginals, std::span<const int> planted);

/// Overlap maximized over all relabelings of the groups (q <= 8).
double permutation_max_overlap(const Matrix& marginals, std::span<const int> planted, int q);

struct WeakLimits {
  double overlap;
  double marginal_overlap;
};

/// Closed forms for equally spaced offsets: Q = (1 + (q-1) delta / 2) / q,
/// Q_mu = (1 + (q^2 - 1) delta^2 / 12) / q.
WeakLimits weak_limits(int q, double delta);
/// General prior: max_a gamma_a and gamma_bar.
WeakLimits weak_limits(const GroupPrior& prior);

struct OverlapReport {
  double q = 0.0;
  double q_mu = 0.0;
  double q_perm = 0.0;
  double baseline_q = 0.0;
  double baseline_qmu = 0.0;
};

OverlapReport overlap_report(const Matrix& marginals, std::span<const int> planted,
                             const WeakLimits& baseline);

}  // namespace sbm
