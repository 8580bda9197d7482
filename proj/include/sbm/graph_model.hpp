#pragma once

#include "sbm/core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sbm {

/// Expected group fractions gamma_a. Entries lie in (0,1) and sum to one.
class GroupPrior {
 public:
  explicit GroupPrior(Vector gamma);

  int q() const { return static_cast<int>(gamma_.size()); }
  const Vector& gamma() const { return gamma_; }
  double operator[](int a) const { return gamma_[a]; }

  friend bool operator==(const GroupPrior& x, const GroupPrior& y) { return x.gamma_ == y.gamma_; }

 private:
  Vector gamma_;
};

/// Symmetric, non-negative scaled edge intensities c_ab (p_ab = c_ab / n).
class AffinityMatrix {
 public:
  explicit AffinityMatrix(Matrix c);

  int q() const { return static_cast<int>(c_.rows()); }
  const Matrix& matrix() const { return c_; }
  double operator()(int a, int b) const { return c_(a, b); }

  friend bool operator==(const AffinityMatrix& x, const AffinityMatrix& y) { return x.c_ == y.c_; }

 private:
  Matrix c_;
};

struct BlockModelSpec {
  BlockModelSpec(int n, GroupPrior prior, AffinityMatrix affinity);

  int n;
  GroupPrior prior;
  AffinityMatrix affinity;

  int q() const { return prior.q(); }
  friend bool operator==(const BlockModelSpec&, const BlockModelSpec&) = default;
};

/// Offsets zeta_a = a - (q+1)/2 for a = 1..q.
Vector equally_spaced_offsets(int q);

/// gamma_a = (1 + delta * zeta_a) / q.
GroupPrior group_sizes(int q, double delta, const Vector& zeta);
inline GroupPrior group_sizes(int q, double delta) { return group_sizes(q, delta, equally_spaced_offsets(q)); }

/// Sum of squared group fractions: the chance-level marginal overlap.
template <typename Derived>
double gamma_bar(const Eigen::MatrixBase<Derived>& gamma) {
  return gamma.squaredNorm();
}
inline double gamma_bar(const GroupPrior& prior) { return gamma_bar(prior.gamma()); }

/// Per-group expected degrees c_a = sum_b c_ab gamma_b, as an Eigen expression.
template <typename DerivedC, typename DerivedG>
auto group_degrees(const Eigen::MatrixBase<DerivedC>& c, const Eigen::MatrixBase<DerivedG>& gamma) {
  return c * gamma;
}

/// c_ab = c + (delta_ab - gamma_bar) * epsilon, holding the mean degree at c.
AffinityMatrix affinity_from_strength(double c, double epsilon, const GroupPrior& prior);

/// Planted coloring: zero diagonal, off-diagonal c / (1 - gamma_bar).
AffinityMatrix disassortative_affinity(double c, const GroupPrior& prior);

struct DegreeProfile {
  Vector group_degrees;
  double mean_degree;
};

DegreeProfile degree_profile(const GroupPrior& prior, const AffinityMatrix& affinity);
inline DegreeProfile degree_profile(const BlockModelSpec& spec) {
  return degree_profile(spec.prior, spec.affinity);
}

/// Two-parameter family used throughout the experiments: mean degree c,
/// strength epsilon = c_in - c_out and asymmetry delta. In disassortative
/// mode c_in = 0 and epsilon is implied by c.
struct SymmetricFamily {
  int q = 2;
  double c = 3.0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<double> zeta;  // empty: equally spaced
  bool disassortative = false;

  Vector offsets() const;
  bool equally_spaced() const { return zeta.empty(); }
  GroupPrior prior() const;
  AffinityMatrix affinity() const;
  BlockModelSpec spec(int n) const;
};

using Edge = std::pair<int, int>;

/// Sparse undirected simple graph with planted labels (0-based internally).
///
/// Adjacency is stored in CSR form with sorted neighbor lists. Every
/// directed edge i->j has an index in [0, 2m): the position of j inside
/// i's neighbor block. `reverse(e)` maps i->j to j->i.
class Network {
 public:
  /// Validates labels and edges; edges may be given in any order and
  /// orientation but must not repeat or contain self-loops.
  Network(BlockModelSpec spec, std::vector<int> planted, std::vector<Edge> edges);

  int n() const { return spec_.n; }
  int q() const { return spec_.q(); }
  std::int64_t m() const { return static_cast<std::int64_t>(edges_.size()); }
  const BlockModelSpec& spec() const { return spec_; }
  const std::vector<int>& planted() const { return planted_; }
  bool has_labels() const { return !planted_.empty(); }

  /// Edges with first < second, sorted lexicographically.
  const std::vector<Edge>& edges() const { return edges_; }

  int degree(int i) const { return static_cast<int>(offsets_[i + 1] - offsets_[i]); }
  std::int64_t edge_begin(int i) const { return offsets_[i]; }
  std::int64_t edge_end(int i) const { return offsets_[i + 1]; }
  std::span<const int> neighbors(int i) const {
    return {targets_.data() + offsets_[i], static_cast<std::size_t>(degree(i))};
  }
  int target(std::int64_t e) const { return targets_[e]; }
  std::int64_t reverse(std::int64_t e) const { return reverse_[e]; }
  /// Reverse indices of the edges leaving i, in neighbor order.
  std::span<const std::int64_t> reverse_block(int i) const {
    return {reverse_.data() + offsets_[i], static_cast<std::size_t>(degree(i))};
  }
  std::int64_t directed_count() const { return static_cast<std::int64_t>(targets_.size()); }
  int max_degree() const { return max_degree_; }

  std::optional<std::int64_t> directed_edge(int i, int j) const;
  bool has_edge(int i, int j) const { return directed_edge(i, j).has_value(); }

  friend bool operator==(const Network& x, const Network& y) {
    return x.spec_ == y.spec_ && x.planted_ == y.planted_ && x.edges_ == y.edges_;
  }

 private:
  BlockModelSpec spec_;
  std::vector<int> planted_;
  std::vector<Edge> edges_;
  std::vector<std::int64_t> offsets_;
  std::vector<int> targets_;
  std::vector<std::int64_t> reverse_;
  int max_degree_ = 0;
};

enum class LabelMode { Multinomial, ExactSizes };

/// Draws labels from the prior (or exact rounded sizes), then for every
/// unordered group pair draws a binomial edge count and picks that many
/// distinct node pairs uniformly. Deterministic for a given seed.
Network sample_network(const BlockModelSpec& spec, std::uint64_t seed,
                       LabelMode labels = LabelMode::Multinomial);

/// Edge sampling for fixed labels (used by the generator and by the adiabatic editor).
std::vector<Edge> sample_edges(const BlockModelSpec& spec, std::span<const int> labels,
                               std::uint64_t seed);

}  // namespace sbm
