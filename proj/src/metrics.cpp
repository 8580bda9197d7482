#include "sbm/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace sbm {
namespace {

void check_shapes(const Matrix& marginals, std::span<const int> planted) {
  if (static_cast<std::size_t>(marginals.cols()) != planted.size()) {
    throw InvalidParameter("marginals and planted labels differ in length");
  }
  for (int s : planted) {
    if (s < 0 || s >= marginals.rows()) throw InvalidParameter("planted label out of range");
  }
}

}  // namespace

int argmax_group(const Eigen::Ref<const Vector>& belief) {
  int best = 0;
  for (int a = 1; a < belief.size(); ++a) {
    if (belief[a] > belief[best]) best = a;
  }
  return best;
}

double overlap(const Matrix& marginals, std::span<const int> planted) {
  check_shapes(marginals, planted);
  if (planted.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < planted.size(); ++i) {
    hits += argmax_group(marginals.col(static_cast<Eigen::Index>(i))) == planted[i];
  }
  return static_cast<double>(hits) / static_cast<double>(planted.size());
}

double marginal_overlap(const Matrix& marginals, std::span<const int> planted) {
  check_shapes(marginals, planted);
  if (planted.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < planted.size(); ++i) {
    total += marginals(planted[i], static_cast<Eigen::Index>(i));
  }
  return total / static_cast<double>(planted.size());
}

double permutation_max_overlap(const Matrix& marginals, std::span<const int> planted, int q) {
  check_shapes(marginals, planted);
  if (q < 1 || q > 8) throw InvalidParameter("exhaustive permutation search supports q <= 8");
  if (marginals.rows() != q) throw InvalidParameter("marginals do not have q rows");
  if (planted.empty()) return 0.0;
  // confusion(assigned, planted)
  Eigen::MatrixXi confusion = Eigen::MatrixXi::Zero(q, q);
  for (std::size_t i = 0; i < planted.size(); ++i) {
    ++confusion(argmax_group(marginals.col(static_cast<Eigen::Index>(i))), planted[i]);
  }
  std::vector<int> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  int best = 0;
  do {
    int hits = 0;
    for (int s = 0; s < q; ++s) hits += confusion(perm[s], s);
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(planted.size());
}

WeakLimits weak_limits(int q, double delta) {
  return {(1.0 + 0.5 * (q - 1) * delta) / q, (1.0 + (q * q - 1.0) * delta * delta / 12.0) / q};
}

WeakLimits weak_limits(const GroupPrior& prior) {
  return {prior.gamma().maxCoeff(), gamma_bar(prior)};
}

OverlapReport overlap_report(const Matrix& marginals, std::span<const int> planted,
                             const WeakLimits& baseline) {
  OverlapReport r;
  r.q = overlap(marginals, planted);
  r.q_mu = marginal_overlap(marginals, planted);
  r.q_perm = marginals.rows() <= 8 ? permutation_max_overlap(marginals, planted, static_cast<int>(marginals.rows()))
                                   : r.q;
  r.baseline_q = baseline.overlap;
  r.baseline_qmu = baseline.marginal_overlap;
  return r;
}

}  // namespace sbm
