#include "doctest.h"
#include "support.hpp"

#include "sbm/bp.hpp"
#include "sbm/local_classifiers.hpp"
#include "sbm/metrics.hpp"

#include <cmath>
#include <map>

using namespace sbm;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

// Isolated nodes only, so every node has degree zero.
Network isolated(int n, const Vector& gamma, const Matrix& c) {
  return Network(BlockModelSpec(n, GroupPrior(gamma), AffinityMatrix(c)), std::vector<int>(n, 0), {});
}

// Direct product-form evaluation of the degree posterior, no logs.
Vector degree_posterior_direct(const Vector& gamma, const Vector& ca, int d) {
  Vector w(gamma.size());
  for (Eigen::Index a = 0; a < gamma.size(); ++a) w[a] = gamma[a] * std::exp(-ca[a]) * std::pow(ca[a], d);
  return w / w.sum();
}

}  // namespace

TEST_SUITE("local_classifiers") {

TEST_CASE("degree posterior at d = 0") {
  SUBCASE("equal groups") {
    // c_a = (4, 2): the diagonal-only affinity below gives exactly these group degrees
    const Vector g = vec({0.5, 0.5});
    const Matrix c = (Matrix(2, 2) << 8, 0, 0, 4).finished();
    const Network net = isolated(3, g, c);
    const Vector ca = vec({4, 2});
    const auto post = degree_classifier(net, net.spec().prior, ca);
    CHECK(post.probs(0, 0) == doctest::Approx(1.0 / (1.0 + std::exp(2.0))).epsilon(1e-14));
    CHECK(post.probs(0, 0) == doctest::Approx(0.1192).epsilon(1e-3));
  }
  SUBCASE("unequal groups") {
    const Vector g = vec({0.8, 0.2});
    const Network net = isolated(2, g, Matrix::Ones(2, 2));
    const auto post = degree_classifier(net, net.spec().prior, vec({6, 3}));
    CHECK(post.probs(0, 1) == doctest::Approx(0.166).epsilon(0.003));
    CHECK(post.probs(1, 1) == doctest::Approx(0.834).epsilon(0.003));
    const double w0 = 0.8 * std::exp(-6.0), w1 = 0.2 * std::exp(-3.0);
    CHECK(post.probs(0, 1) == doctest::Approx(w0 / (w0 + w1)).epsilon(1e-14));
  }
}

TEST_CASE("constant group degrees carry no information") {
  std::mt19937_64 rng(3);
  const GroupPrior p(testing::random_simplex(4, rng));
  const Network net = sample_network(BlockModelSpec(2000, p, AffinityMatrix(Matrix::Constant(4, 4, 5.0))), 1);
  const Vector ca = Vector::Constant(4, 5.0);
  const auto post = degree_classifier(net, p, ca);
  const Matrix msgs = first_order_messages(net, p, ca);
  const auto r2 = radius2_classifier(net, p, net.spec().affinity, ca);
  for (int i = 0; i < net.n(); ++i) {
    CHECK((post.probs.col(i) - p.gamma()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((msgs.col(i) - p.gamma()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((r2.probs.col(i) - p.gamma()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("matches the direct product form") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const int q = 2 + trial % 4;
    const GroupPrior p(testing::random_simplex(q, rng));
    const AffinityMatrix aff(testing::random_affinity(q, rng, 0.5, 9.0));
    const Network net = sample_network(BlockModelSpec(1000, p, aff), rng());
    const Vector ca = group_degrees(aff.matrix(), p.gamma());
    const auto post = degree_classifier(net, p, ca);
    const Matrix msgs = first_order_messages(net, p, ca);
    for (int i = 0; i < net.n(); ++i) {
      const int d = net.degree(i);
      CHECK((post.probs.col(i) - degree_posterior_direct(p.gamma(), ca, d)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((msgs.col(i) - degree_posterior_direct(p.gamma(), ca, std::max(0, d - 1))).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }
}

TEST_CASE("degree-one messages ignore the degree") {
  const Vector g = vec({0.3, 0.7});
  const Matrix c = (Matrix(2, 2) << 6, 1, 1, 2).finished();
  const Network net(BlockModelSpec(2, GroupPrior(g), AffinityMatrix(c)), {0, 1}, {{0, 1}});
  const Vector ca = c * g;
  const Matrix msgs = first_order_messages(net, net.spec().prior, ca);
  const Vector expect = degree_posterior_direct(g, ca, 0);
  CHECK((msgs.col(0) - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((msgs.col(1) - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("radius-2 special cases") {
  const GroupPrior p = group_sizes(3, 0.3);
  const AffinityMatrix flat = affinity_from_strength(4.0, 0.0, p);
  const Network net = sample_network(BlockModelSpec(1500, p, flat), 4);
  const auto r2 = radius2_classifier(net, p, flat, degree_profile(p, flat).group_degrees);
  for (int i = 0; i < net.n(); ++i) CHECK((r2.probs.col(i) - p.gamma()).cwiseAbs().maxCoeff() < 1e-14);

  const AffinityMatrix aff = affinity_from_strength(4.0, 3.0, p);
  const Vector ca = degree_profile(p, aff).group_degrees;
  const Network alone(BlockModelSpec(2, p, aff), {0, 2}, {});
  const auto iso = radius2_classifier(alone, p, aff, ca);
  const auto deg = degree_classifier(alone, p, ca);
  CHECK((iso.probs - deg.probs).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("monotone in the degree") {
  const Vector g = vec({0.4, 0.6});
  const Vector ca = vec({7, 2});
  double last = -1.0;
  for (int d = 0; d <= 20; ++d) {
    std::vector<Edge> edges;
    for (int k = 1; k <= d; ++k) edges.push_back({0, k});
    const Network net(BlockModelSpec(40, GroupPrior(g), AffinityMatrix(Matrix::Ones(2, 2))), std::vector<int>(40, 0),
                      edges);
    const double mu = degree_classifier(net, net.spec().prior, ca).probs(0, 0);
    CHECK(mu > last);
    last = mu;
  }
}

TEST_CASE("zero group degree uses 0^0 = 1") {
  const Vector g = vec({0.5, 0.5});
  const Network net(BlockModelSpec(3, GroupPrior(g), AffinityMatrix(Matrix::Ones(2, 2))), {0, 0, 1}, {{0, 1}});
  const auto post = degree_classifier(net, net.spec().prior, vec({0, 3}));
  CHECK(post.probs(0, 2) == doctest::Approx(1.0 / (1.0 + std::exp(-3.0))));
  CHECK(post.probs(0, 0) == 0.0);
  CHECK(post.probs(1, 0) == 1.0);
  CHECK_THROWS_AS(degree_classifier(net, net.spec().prior, vec({0, 0})), InvalidParameter);
  CHECK_THROWS_AS(degree_classifier(net, net.spec().prior, vec({1, 2, 3})), InvalidParameter);
}

TEST_CASE("equivalence with finite-step propagation") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 6; ++trial) {
    const int q = 2 + trial % 4;
    const GroupPrior p(testing::random_simplex(q, rng, 0.2));
    const AffinityMatrix aff(testing::random_affinity(q, rng, 0.5, 8.0));
    const Network net = sample_network(BlockModelSpec(3000, p, aff), rng());
    const Vector ca = degree_profile(p, aff).group_degrees;
    const MessageSet one = run_finite(net, 1);
    const MessageSet two = run_finite(net, 2);
    CHECK((one.marginals - degree_classifier(net, p, ca).probs).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((two.marginals - radius2_classifier(net, p, aff, ca).probs).cwiseAbs().maxCoeff() <= 1e-12);

    // the step-1 message out of i is the same towards every neighbor
    const Matrix msgs = first_order_messages(net, p, ca);
    for (int i = 0; i < net.n(); ++i) {
      for (auto e = net.edge_begin(i); e < net.edge_end(i); ++e) {
        CHECK((one.messages.col(e) - msgs.col(i)).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("radius-1 Bayes optimality") {
  const SymmetricFamily f{2, 5.0, 4.0, 0.4, {}, false};
  const Network net = sample_network(f.spec(100000), 2024);
  const GroupPrior p = f.prior();
  const auto post = degree_classifier(net, p, degree_profile(f.spec(1)).group_degrees);
  std::map<int, std::pair<int, int>> bins;  // degree -> (count, count in group 0)
  for (int i = 0; i < net.n(); ++i) {
    auto& b = bins[net.degree(i)];
    ++b.first;
    if (net.planted()[i] == 0) ++b.second;
  }
  int checked = 0;
  for (const auto& [d, b] : bins) {
    if (b.first < 500) continue;
    int node = -1;
    for (int i = 0; i < net.n() && node < 0; ++i) {
      if (net.degree(i) == d) node = i;
    }
    // 0.02 absolute, widened to three binomial standard errors for thin bins
    const double p0 = post.probs(0, node);
    const double tol = std::max(0.02, 3.0 * std::sqrt(p0 * (1 - p0) / b.first));
    CHECK(std::abs(static_cast<double>(b.second) / b.first - p0) < tol);
    ++checked;
  }
  CHECK(checked >= 5);
}

TEST_CASE("better than chance with unequal groups") {
  const SymmetricFamily f{3, 4.0, 3.0, 0.3, {}, false};
  const Network net = sample_network(f.spec(100000), 11);
  const GroupPrior p = f.prior();
  const auto post = degree_classifier(net, p, degree_profile(f.spec(1)).group_degrees);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < net.n(); ++i) {
    const double x = post.probs(net.planted()[i], i);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / net.n();
  const double se = std::sqrt((sq / net.n() - mean * mean) / net.n());
  // compare against the empirical chance level of this labeling
  double chance = 0.0;
  for (int s : net.planted()) chance += p[s];
  chance /= net.n();
  CHECK(mean > chance + 3 * se);
  CHECK(marginal_overlap(post.probs, net.planted()) == doctest::Approx(mean));
}

}  // TEST_SUITE
