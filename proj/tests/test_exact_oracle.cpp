#include "doctest.h"
#include "support.hpp"

#include "sbm/bp.hpp"
#include "sbm/exact_oracle.hpp"

#include <cmath>

using namespace sbm;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

const WeightModel kModels[] = {WeightModel::TreeOnly, WeightModel::Poissonized, WeightModel::Bernoulli};

// Reference enumeration written independently of the library: explicit
// weights, plain double sums (fine at the sizes used here).
struct Brute {
  Matrix marginals;
  double log_evidence;
};

Brute brute_force(const Network& net, WeightModel model) {
  const int n = net.n(), q = net.q();
  const Matrix& c = net.spec().affinity.matrix();
  const Vector& g = net.spec().prior.gamma();
  Matrix marg = Matrix::Zero(q, n);
  double total = 0.0;
  std::vector<int> s(n, 0);
  long states = 1;
  for (int i = 0; i < n; ++i) states *= q;
  for (long code = 0; code < states; ++code) {
    long x = code;
    for (int i = 0; i < n; ++i) {
      s[i] = static_cast<int>(x % q);
      x /= q;
    }
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= g[s[i]];
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double cij = c(s[i], s[j]);
        const bool edge = net.has_edge(i, j);
        switch (model) {
          case WeightModel::TreeOnly: w *= edge ? cij : 1.0; break;
          case WeightModel::Poissonized: w *= (edge ? cij : 1.0) * std::exp(-cij / n); break;
          case WeightModel::Bernoulli: w *= edge ? cij / n : 1.0 - cij / n; break;
        }
      }
    }
    total += w;
    for (int i = 0; i < n; ++i) marg(s[i], i) += w;
  }
  return {marg / total, std::log(total)};
}

}  // namespace

TEST_SUITE("exact_oracle") {

TEST_CASE("single node gives the prior") {
  const Vector g = vec({0.2, 0.3, 0.5});
  const Network net(BlockModelSpec(1, GroupPrior(g), AffinityMatrix(Matrix::Constant(3, 3, 0.5))), {1}, {});
  const ExactPosterior tree = exact_posterior(net, WeightModel::TreeOnly);
  CHECK((tree.marginals.col(0) - g).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(tree.log_evidence) < 1e-15);
  for (WeightModel m : kModels) CHECK((exact_marginals(net, m).col(0) - g).cwiseAbs().maxCoeff() < 1e-15);

  Vector one(1);
  one << 1.0;
  const Network trivial(BlockModelSpec(1, GroupPrior(one), AffinityMatrix(Matrix::Constant(1, 1, 0.5))), {0}, {});
  CHECK(exact_log_evidence(trivial, WeightModel::TreeOnly) == 0.0);
}

TEST_CASE("single edge by hand") {
  const Matrix c = (Matrix(2, 2) << 4, 2, 2, 4).finished();
  const Network net(BlockModelSpec(2, GroupPrior(vec({0.5, 0.5})), AffinityMatrix(c)), {0, 1}, {{0, 1}});
  const ExactPosterior post = exact_posterior(net, WeightModel::TreeOnly);
  CHECK(post.log_evidence == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(post.marginals(0, 0) == doctest::Approx(0.5));
  CHECK(post.marginals(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("odd cycle has no proper two-coloring") {
  const Matrix c = (Matrix(2, 2) << 0, 2, 2, 0).finished();
  const Network triangle(BlockModelSpec(3, GroupPrior(vec({0.5, 0.5})), AffinityMatrix(c)), {0, 1, 0},
                         {{0, 1}, {1, 2}, {0, 2}});
  for (WeightModel m : kModels) CHECK_THROWS_AS(exact_posterior(triangle, m), ZeroEvidence);
}

TEST_CASE("size cap") {
  const Network big(BlockModelSpec(15, group_sizes(3, 0.0), AffinityMatrix(Matrix::Ones(3, 3))),
                    std::vector<int>(15, 0), {});
  CHECK_THROWS_AS(exact_posterior(big, WeightModel::TreeOnly), InstanceTooLarge);
  const Network ok(BlockModelSpec(14, group_sizes(3, 0.0), AffinityMatrix(Matrix::Ones(3, 3))),
                   std::vector<int>(14, 0), {});
  CHECK_NOTHROW(exact_posterior(ok, WeightModel::TreeOnly));  // 3^14 = 4.8e6
  CHECK_THROWS_AS(exact_posterior(ok, WeightModel::TreeOnly, 1000), InstanceTooLarge);
}

TEST_CASE("model names") {
  for (WeightModel m : kModels) CHECK(parse_weight_model(to_string(m)) == m);
  CHECK_THROWS_AS(parse_weight_model("exact"), InvalidParameter);
}

TEST_CASE("agrees with an independent enumeration") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 12; ++trial) {
    const int q = 2 + trial % 3;
    const int n = 4 + trial % 4;
    BlockModelSpec spec(n, GroupPrior(testing::random_simplex(q, rng)),
                        AffinityMatrix(testing::random_affinity(q, rng, 0.2, 3.0)));
    // random graph with loops, not only trees
    std::vector<Edge> edges;
    std::bernoulli_distribution keep(0.4);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (keep(rng)) edges.push_back({i, j});
      }
    }
    const Network net(spec, testing::random_labels(n, q, rng), edges);
    for (WeightModel m : kModels) {
      const ExactPosterior got = exact_posterior(net, m);
      const Brute want = brute_force(net, m);
      CHECK((got.marginals - want.marginals).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(got.log_evidence == doctest::Approx(want.log_evidence).epsilon(1e-12));
    }
  }
}

TEST_CASE("no underflow at the largest sizes") {
  // raw weights far below the double range
  std::mt19937_64 rng(2);
  const int n = 9, q = 5;
  std::vector<Edge> edges = testing::random_tree(n, rng);
  BlockModelSpec spec(n, GroupPrior(testing::random_simplex(q, rng)), AffinityMatrix(Matrix::Constant(q, q, 1e-40)));
  const Network net(spec, testing::random_labels(n, q, rng), edges);
  const ExactPosterior post = exact_posterior(net, WeightModel::TreeOnly);
  CHECK(std::isfinite(post.log_evidence));
  CHECK(post.log_evidence == doctest::Approx((n - 1) * std::log(1e-40)).epsilon(1e-12));
  for (int i = 0; i < n; ++i) CHECK((post.marginals.col(i) - spec.prior.gamma()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("marginals normalized and equivariant") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 8; ++trial) {
    const int q = 2 + trial % 3;
    const Network net = testing::random_tree_network(6 + trial % 3, q, rng);
    std::vector<int> perm(q);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const Network pnet = testing::relabel_groups(net, perm);
    for (WeightModel m : kModels) {
      const ExactPosterior a = exact_posterior(net, m);
      const ExactPosterior b = exact_posterior(pnet, m);
      CHECK((a.marginals.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
      for (int x = 0; x < q; ++x) CHECK((a.marginals.row(x) - b.marginals.row(perm[x])).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(a.log_evidence == doctest::Approx(b.log_evidence).epsilon(1e-12));
    }
  }
}

TEST_CASE("Poissonized correction shrinks with n") {
  // With equal group degrees the non-edge factors only couple a node to
  // the label composition of the rest, which fades slowly with n. With
  // unequal group degrees they act as an O(c) field at every n and the
  // gap grows instead.
  std::mt19937_64 rng(5);
  const GroupPrior p((Vector(2) << 0.25, 0.75).finished());
  const AffinityMatrix equal((Matrix(2, 2) << 6, 2, 2, 10.0 / 3.0).finished());  // c_a = 3 for both
  const AffinityMatrix unequal((Matrix(2, 2) << 5, 1, 1, 2).finished());
  auto mean_gap = [&](const AffinityMatrix& aff, int n) {
    double sum = 0.0;
    for (int rep = 0; rep < 4; ++rep) {
      const Network net(BlockModelSpec(n, p, aff), std::vector<int>(n, 0), testing::random_tree(n, rng));
      sum += (exact_marginals(net, WeightModel::TreeOnly) - exact_marginals(net, WeightModel::Poissonized))
                 .cwiseAbs()
                 .maxCoeff();
    }
    return sum / 4;
  };
  const double e12 = mean_gap(equal, 12), e16 = mean_gap(equal, 16), e20 = mean_gap(equal, 20);
  CHECK(e16 < e12);
  CHECK(e20 < e16);
  const double u8 = mean_gap(unequal, 8), u16 = mean_gap(unequal, 16);
  CHECK(u16 > u8);
}

TEST_CASE("belief propagation is exact on trees") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const int q = trial % 2 ? 3 : 2;
    const Network net = testing::random_tree_network(8, q, rng);
    BpOptions opt;
    opt.nonedge_field = false;
    opt.tol = 1e-14;
    opt.order_seed = rng();
    const auto [state, report] = run_to_convergence(net, InitMode::random(rng()), opt);
    REQUIRE(report.converged);
    const ExactPosterior post = exact_posterior(net, WeightModel::TreeOnly);
    CHECK((state.marginals - post.marginals).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::abs(report.log_likelihood - post.log_evidence) < 1e-8);
  }
}

}  // TEST_SUITE
