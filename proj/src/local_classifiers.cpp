#include "sbm/local_classifiers.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sbm {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_inputs(const Network& net, const GroupPrior& prior, const Vector& group_degrees) {
  if (prior.q() != net.q() || group_degrees.size() != net.q()) {
    throw InvalidParameter("classifier inputs disagree on the number of groups");
  }
  if ((group_degrees.array() < 0.0).any()) throw InvalidParameter("group degrees must be non-negative");
}

// log(c^d) with the convention 0^0 = 1.
double log_power(double c, int d) {
  if (d == 0) return 0.0;
  return c > 0.0 ? d * std::log(c) : kNegInf;
}

// Normalizes a column of log-weights in place into probabilities.
void normalize_log_column(Eigen::Ref<Vector> column, int node) {
  const double mx = column.maxCoeff();
  if (mx == kNegInf) {
    throw InvalidParameter("no group can explain node " + std::to_string(node) + "'s neighborhood");
  }
  // scalar exp: Eigen's packet exp flushes exp(-inf) to a denormal, not zero
  column = column.unaryExpr([mx](double x) { return std::exp(x - mx); });
  column /= column.sum();
}

// log of gamma_b e^{-c_b} c_b^{d}, for each b.
Vector log_degree_weights(const GroupPrior& prior, const Vector& ca, int d) {
  Vector w(prior.q());
  for (int b = 0; b < prior.q(); ++b) w[b] = std::log(prior[b]) - ca[b] + log_power(ca[b], d);
  return w;
}

}  // namespace

LocalPosterior degree_classifier(const Network& net, const GroupPrior& prior,
                                 const Vector& group_degrees) {
  check_inputs(net, prior, group_degrees);
  Matrix probs(net.q(), net.n());
  for (int i = 0; i < net.n(); ++i) {
    probs.col(i) = log_degree_weights(prior, group_degrees, net.degree(i));
    normalize_log_column(probs.col(i), i);
  }
  return {std::move(probs), 1};
}

Matrix first_order_messages(const Network& net, const GroupPrior& prior, const Vector& group_degrees) {
  check_inputs(net, prior, group_degrees);
  Matrix msgs(net.q(), net.n());
  for (int i = 0; i < net.n(); ++i) {
    msgs.col(i) = log_degree_weights(prior, group_degrees, std::max(0, net.degree(i) - 1));
    normalize_log_column(msgs.col(i), i);
  }
  return msgs;
}

LocalPosterior radius2_classifier(const Network& net, const GroupPrior& prior,
                                  const AffinityMatrix& affinity, const Vector& group_degrees) {
  check_inputs(net, prior, group_degrees);
  const int q = net.q();
  const Matrix& c = affinity.matrix();

  // Per neighbor degree d: log sum_b c_ab gamma_b e^{-c_b} c_b^{d-1}, for each a.
  Matrix by_degree(q, net.max_degree() + 1);
  for (int d = 1; d <= net.max_degree(); ++d) {
    const Vector w = log_degree_weights(prior, group_degrees, d - 1);
    for (int a = 0; a < q; ++a) {
      double mx = kNegInf;
      for (int b = 0; b < q; ++b) {
        if (c(a, b) > 0.0) mx = std::max(mx, w[b] + std::log(c(a, b)));
      }
      double s = 0.0;
      if (mx != kNegInf) {
        for (int b = 0; b < q; ++b) {
          if (c(a, b) > 0.0) s += std::exp(w[b] + std::log(c(a, b)) - mx);
        }
      }
      by_degree(a, d) = mx == kNegInf ? kNegInf : mx + std::log(s);
    }
  }

  Matrix probs(q, net.n());
  for (int i = 0; i < net.n(); ++i) {
    Vector logp(q);
    for (int a = 0; a < q; ++a) logp[a] = std::log(prior[a]) - group_degrees[a];
    for (int k : net.neighbors(i)) logp += by_degree.col(net.degree(k));
    probs.col(i) = logp;
    normalize_log_column(probs.col(i), i);
  }
  return {std::move(probs), 2};
}

}  // namespace sbm
