#include "sbm/exact_oracle.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace sbm {

std::string_view to_string(WeightModel model) {
  switch (model) {
    case WeightModel::TreeOnly: return "tree";
    case WeightModel::Poissonized: return "poisson";
    case WeightModel::Bernoulli: return "bernoulli";
  }
  return "unknown";
}

WeightModel parse_weight_model(std::string_view name) {
  if (name == "tree") return WeightModel::TreeOnly;
  if (name == "poisson") return WeightModel::Poissonized;
  if (name == "bernoulli") return WeightModel::Bernoulli;
  throw InvalidParameter("unknown weight model '" + std::string(name) + "'");
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

// Streaming log-sum-exp over leaves, with per-node/group accumulators
// sharing one reference scale.
class Accumulator {
 public:
  Accumulator(int q, int n) : marg_(Matrix::Zero(q, n)) {}

  void add(double log_w, const std::vector<int>& labels) {
    if (log_w == kNegInf) return;
    if (log_w > ref_) {
      const double shrink = ref_ == kNegInf ? 0.0 : std::exp(ref_ - log_w);
      total_ *= shrink;
      marg_ *= shrink;
      ref_ = log_w;
    }
    const double w = std::exp(log_w - ref_);
    total_ += w;
    for (std::size_t i = 0; i < labels.size(); ++i) marg_(labels[i], static_cast<Eigen::Index>(i)) += w;
  }

  bool empty() const { return ref_ == kNegInf; }
  double log_total() const { return ref_ + std::log(total_); }
  Matrix marginals() const { return marg_ / total_; }

 private:
  Matrix marg_;
  double total_ = 0.0;
  double ref_ = kNegInf;
};

}  // namespace

ExactPosterior exact_posterior(const Network& net, WeightModel model, std::uint64_t max_states) {
  const int n = net.n();
  const int q = net.q();
  double states = 1.0;
  for (int i = 0; i < n; ++i) {
    states *= q;
    if (states > static_cast<double>(max_states)) {
      throw InstanceTooLarge("q^n = " + std::to_string(q) + "^" + std::to_string(n) +
                             " exceeds the enumeration cap");
    }
  }

  const Matrix& c = net.spec().affinity.matrix();
  const Vector& gamma = net.spec().prior.gamma();
  // Pairwise log-factors for an edge and for a non-adjacent pair.
  Matrix edge_log(q, q);
  Matrix pair_log = Matrix::Zero(q, q);
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      const double p = c(a, b) / n;
      switch (model) {
        case WeightModel::TreeOnly:
          edge_log(a, b) = safe_log(c(a, b));
          break;
        case WeightModel::Poissonized:
          edge_log(a, b) = safe_log(c(a, b)) - p;
          pair_log(a, b) = -p;
          break;
        case WeightModel::Bernoulli:
          if (p > 1.0) throw InvalidParameter("Bernoulli weights need c_ab <= n");
          edge_log(a, b) = safe_log(p);
          pair_log(a, b) = p < 1.0 ? std::log1p(-p) : kNegInf;
          break;
      }
    }
  }

  std::vector<std::vector<char>> adjacent(n, std::vector<char>(n, 0));
  for (const auto& [u, v] : net.edges()) adjacent[u][v] = adjacent[v][u] = 1;

  Accumulator acc(q, n);
  std::vector<int> labels(n, 0);
  std::vector<double> partial(n + 1, 0.0);  // log weight of nodes [0, depth)

  // Iterative depth-first enumeration in mixed-radix order.
  int depth = 0;
  labels.assign(n, -1);
  while (depth >= 0) {
    if (depth == n) {
      acc.add(partial[n], labels);
      --depth;
      continue;
    }
    if (++labels[depth] >= q) {
      labels[depth] = -1;
      --depth;
      continue;
    }
    const int a = labels[depth];
    double w = partial[depth] + std::log(gamma[a]);
    for (int u = 0; u < depth && w != kNegInf; ++u) {
      w += adjacent[depth][u] ? edge_log(a, labels[u]) : pair_log(a, labels[u]);
    }
    if (w == kNegInf) continue;  // prune: every completion has zero weight
    partial[depth + 1] = w;
    ++depth;
  }

  if (acc.empty()) throw ZeroEvidence("all assignments have zero weight");
  return {acc.marginals(), acc.log_total()};
}

}  // namespace sbm
