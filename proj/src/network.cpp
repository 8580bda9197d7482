#include "sbm/graph_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unordered_set>

namespace sbm {

Network::Network(BlockModelSpec spec, std::vector<int> planted, std::vector<Edge> edges)
    : spec_(std::move(spec)), planted_(std::move(planted)), edges_(std::move(edges)) {
  const int n = spec_.n;
  if (!planted_.empty()) {
    if (static_cast<int>(planted_.size()) != n) {
      throw InvalidParameter("planted label count differs from n");
    }
    for (int s : planted_) {
      if (s < 0 || s >= spec_.q()) throw InvalidParameter("planted label out of range");
    }
  }
  for (auto& [u, v] : edges_) {
    if (u < 0 || v < 0 || u >= n || v >= n) throw InvalidParameter("edge endpoint out of range");
    if (u == v) throw InvalidParameter("self-loop at node " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw InvalidParameter("duplicate edge " + std::to_string(dup->first) + " " +
                           std::to_string(dup->second));
  }

  offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [u, v] : edges_) {
    ++offsets_[u + 1];
    ++offsets_[v + 1];
  }
  for (int i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  targets_.resize(offsets_[n]);
  std::vector<std::int64_t> fill(offsets_.begin(), offsets_.end() - 1);
  // Lexicographic edge order leaves every neighbor block sorted.
  for (const auto& [u, v] : edges_) {
    targets_[fill[u]++] = v;
    targets_[fill[v]++] = u;
  }
  reverse_.resize(targets_.size());
  for (int i = 0; i < n; ++i) {
    max_degree_ = std::max(max_degree_, degree(i));
    for (std::int64_t e = offsets_[i]; e < offsets_[i + 1]; ++e) {
      reverse_[e] = *directed_edge(targets_[e], i);
    }
  }
}

std::optional<std::int64_t> Network::directed_edge(int i, int j) const {
  const auto nb = neighbors(i);
  const auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) return std::nullopt;
  return offsets_[i] + (it - nb.begin());
}

namespace {

std::vector<int> draw_labels(const GroupPrior& prior, int n, LabelMode mode, std::mt19937_64& rng) {
  const int q = prior.q();
  std::vector<int> labels(n);
  if (mode == LabelMode::Multinomial) {
    std::discrete_distribution<int> pick(prior.gamma().data(), prior.gamma().data() + q);
    for (int& s : labels) s = pick(rng);
    return labels;
  }
  // Exact sizes: floor(n gamma_a) per group, remainder to the largest fractional parts.
  std::vector<int> counts(q);
  std::vector<std::pair<double, int>> frac(q);
  int assigned = 0;
  for (int a = 0; a < q; ++a) {
    const double target = n * prior[a];
    counts[a] = static_cast<int>(std::floor(target));
    frac[a] = {-(target - counts[a]), a};
    assigned += counts[a];
  }
  std::sort(frac.begin(), frac.end());
  for (int k = 0; assigned < n; ++k, ++assigned) ++counts[frac[k % q].second];
  int pos = 0;
  for (int a = 0; a < q; ++a) {
    for (int k = 0; k < counts[a]; ++k) labels[pos++] = a;
  }
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

// Maps an index in [0, N(N-1)/2) to the pair (u, v), u < v, in the order
// v = 1..N-1, u = 0..v-1.
std::pair<std::int64_t, std::int64_t> triangular_pair(std::int64_t k) {
  auto v = static_cast<std::int64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
  while (v * (v - 1) / 2 > k) --v;
  while ((v + 1) * v / 2 <= k) ++v;
  return {k - v * (v - 1) / 2, v};
}

// Robert Floyd's sampler: `count` distinct values from [0, range), sorted.
std::vector<std::int64_t> distinct_indices(std::int64_t range, std::int64_t count,
                                           std::mt19937_64& rng) {
  std::unordered_set<std::int64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(count) * 2);
  for (std::int64_t j = range - count; j < range; ++j) {
    std::uniform_int_distribution<std::int64_t> pick(0, j);
    if (!chosen.insert(pick(rng)).second) chosen.insert(j);
  }
  std::vector<std::int64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Edge> sample_edges(const BlockModelSpec& spec, std::span<const int> labels,
                               std::uint64_t seed) {
  const int q = spec.q();
  const int n = spec.n;
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      if (spec.affinity(a, b) > n) {
        throw InvalidParameter("c_" + std::to_string(a + 1) + std::to_string(b + 1) +
                               " exceeds n, so p_ab > 1");
      }
    }
  }
  std::vector<std::vector<int>> members(q);
  for (int i = 0; i < n; ++i) members[labels[i]].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (int a = 0; a < q; ++a) {
    for (int b = a; b < q; ++b) {
      const auto na = static_cast<std::int64_t>(members[a].size());
      const auto nb = static_cast<std::int64_t>(members[b].size());
      const std::int64_t pairs = (a == b) ? na * (na - 1) / 2 : na * nb;
      const double p = spec.affinity(a, b) / n;
      if (pairs == 0 || p <= 0.0) continue;
      std::int64_t count = pairs;
      if (p < 1.0) count = std::binomial_distribution<std::int64_t>(pairs, p)(rng);
      for (std::int64_t k : distinct_indices(pairs, count, rng)) {
        if (a == b) {
          const auto [u, v] = triangular_pair(k);
          edges.emplace_back(members[a][u], members[a][v]);
        } else {
          edges.emplace_back(members[a][k / nb], members[b][k % nb]);
        }
      }
    }
  }
  return edges;
}

Network sample_network(const BlockModelSpec& spec, std::uint64_t seed, LabelMode labels) {
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::vector<int> planted = draw_labels(spec.prior, spec.n, labels, rng);
  std::vector<Edge> edges = sample_edges(spec, planted, derive_seed(seed, 2));
  return Network(spec, std::move(planted), std::move(edges));
}

}  // namespace sbm
