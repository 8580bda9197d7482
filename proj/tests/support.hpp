#pragma once

// Seeded instance generators shared by the property tests.

#include "sbm/graph_model.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace sbm::testing {

inline Vector random_simplex(int q, std::mt19937_64& rng, double floor = 0.05) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  Vector g(q);
  for (int a = 0; a < q; ++a) g[a] = u(rng);
  return g / g.sum();
}

// Symmetric with entries in [lo, hi].
inline Matrix random_affinity(int q, std::mt19937_64& rng, double lo = 0.2, double hi = 5.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix c(q, q);
  for (int a = 0; a < q; ++a) {
    for (int b = a; b < q; ++b) c(a, b) = c(b, a) = u(rng);
  }
  return c;
}

// Uniform random recursive tree: node k attaches to a random earlier node.
inline std::vector<Edge> random_tree(int n, std::mt19937_64& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Edge> edges;
  for (int k = 1; k < n; ++k) {
    std::uniform_int_distribution<int> parent(0, k - 1);
    edges.push_back({perm[k], perm[parent(rng)]});
  }
  return edges;
}

inline std::vector<int> random_labels(int n, int q, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> g(0, q - 1);
  std::vector<int> s(n);
  for (auto& x : s) x = g(rng);
  return s;
}

// Random small instance on a tree with arbitrary prior and affinity.
inline Network random_tree_network(int n, int q, std::mt19937_64& rng) {
  BlockModelSpec spec(n, GroupPrior(random_simplex(q, rng)), AffinityMatrix(random_affinity(q, rng)));
  return Network(spec, random_labels(n, q, rng), random_tree(n, rng));
}

inline Network relabel_groups(const Network& net, const std::vector<int>& perm) {
  const int q = net.q();
  Vector g(q);
  Matrix c(q, q);
  for (int a = 0; a < q; ++a) {
    g[perm[a]] = net.spec().prior[a];
    for (int b = 0; b < q; ++b) c(perm[a], perm[b]) = net.spec().affinity(a, b);
  }
  std::vector<int> labels(net.planted());
  for (auto& s : labels) s = perm[s];
  return Network(BlockModelSpec(net.n(), GroupPrior(g), AffinityMatrix(c)), labels, net.edges());
}

}  // namespace sbm::testing
