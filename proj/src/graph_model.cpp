#include "sbm/graph_model.hpp"

#include <cmath>
#include <string>

namespace sbm {
namespace {

constexpr double kSumTolerance = 1e-12;

// Entries within this distance below zero are treated as rounding noise.
double clamp_rounding(double value, double scale) {
  if (value < 0.0 && value > -1e-12 * std::max(1.0, scale)) return 0.0;
  return value;
}

}  // namespace

GroupPrior::GroupPrior(Vector gamma) : gamma_(std::move(gamma)) {
  if (gamma_.size() < 1) throw InvalidParameter("group prior needs at least one group");
  for (int a = 0; a < gamma_.size(); ++a) {
    const double g = gamma_[a];
    // A single group is the one case where gamma = 1 is allowed.
    const bool in_range = g > 0.0 && (g < 1.0 || (gamma_.size() == 1 && g == 1.0));
    if (!std::isfinite(g) || !in_range) {
      throw InvalidParameter("gamma_" + std::to_string(a + 1) + " = " + std::to_string(g) +
                             " is outside (0,1)");
    }
  }
  if (std::abs(gamma_.sum() - 1.0) > kSumTolerance) {
    throw InvalidParameter("group prior does not sum to one");
  }
}

AffinityMatrix::AffinityMatrix(Matrix c) : c_(std::move(c)) {
  if (c_.rows() < 1 || c_.rows() != c_.cols()) {
    throw InvalidParameter("affinity matrix must be square and non-empty");
  }
  for (int a = 0; a < c_.rows(); ++a) {
    for (int b = 0; b < c_.cols(); ++b) {
      if (!std::isfinite(c_(a, b)) || c_(a, b) < 0.0) {
        throw InvalidParameter("affinity entries must be finite and non-negative");
      }
      if (c_(a, b) != c_(b, a)) throw InvalidParameter("affinity matrix must be symmetric");
    }
  }
}

BlockModelSpec::BlockModelSpec(int n_, GroupPrior prior_, AffinityMatrix affinity_)
    : n(n_), prior(std::move(prior_)), affinity(std::move(affinity_)) {
  if (n < 1) throw InvalidParameter("network needs at least one node");
  if (prior.q() != affinity.q()) {
    throw InvalidParameter("affinity dimension does not match the number of groups");
  }
}

Vector equally_spaced_offsets(int q) {
  Vector zeta(q);
  for (int a = 0; a < q; ++a) zeta[a] = (a + 1) - 0.5 * (q + 1);
  return zeta;
}

GroupPrior group_sizes(int q, double delta, const Vector& zeta) {
  if (q < 2) throw InvalidParameter("need at least two groups");
  if (zeta.size() != q) throw InvalidParameter("offset vector length differs from q");
  if (std::abs(zeta.sum()) > kSumTolerance * std::max(1.0, zeta.cwiseAbs().sum())) {
    throw InvalidParameter("group offsets zeta must sum to zero");
  }
  Vector gamma(q);
  for (int a = 0; a < q; ++a) {
    const double scaled = 1.0 + delta * zeta[a];
    if (!(scaled > 0.0)) {
      throw InvalidParameter("group " + std::to_string(a + 1) + " has non-positive size");
    }
    gamma[a] = scaled / q;
  }
  return GroupPrior(std::move(gamma));
}

AffinityMatrix affinity_from_strength(double c, double epsilon, const GroupPrior& prior) {
  const double gbar = gamma_bar(prior);
  const double scale = std::abs(c) + std::abs(epsilon);
  const double c_in = clamp_rounding(c + (1.0 - gbar) * epsilon, scale);
  const double c_out = clamp_rounding(c - gbar * epsilon, scale);
  if (c_in < 0.0 || c_out < 0.0) {
    throw InvalidParameter("strength epsilon=" + std::to_string(epsilon) + " at mean degree c=" +
                           std::to_string(c) + " implies a negative c_in or c_out");
  }
  const int q = prior.q();
  Matrix m = Matrix::Constant(q, q, c_out);
  m.diagonal().setConstant(c_in);
  return AffinityMatrix(std::move(m));
}

AffinityMatrix disassortative_affinity(double c, const GroupPrior& prior) {
  const double gbar = gamma_bar(prior);
  if (prior.q() < 2 || !(gbar < 1.0)) throw InvalidParameter("planted coloring needs q >= 2");
  if (c < 0.0) throw InvalidParameter("mean degree must be non-negative");
  const int q = prior.q();
  Matrix m = Matrix::Constant(q, q, c / (1.0 - gbar));
  m.diagonal().setZero();
  return AffinityMatrix(std::move(m));
}

DegreeProfile degree_profile(const GroupPrior& prior, const AffinityMatrix& affinity) {
  Vector ca = group_degrees(affinity.matrix(), prior.gamma());
  const double mean = prior.gamma().dot(ca);
  return {std::move(ca), mean};
}

Vector SymmetricFamily::offsets() const {
  if (zeta.empty()) return equally_spaced_offsets(q);
  return Eigen::Map<const Vector>(zeta.data(), static_cast<Eigen::Index>(zeta.size()));
}

GroupPrior SymmetricFamily::prior() const { return group_sizes(q, delta, offsets()); }

AffinityMatrix SymmetricFamily::affinity() const {
  const GroupPrior p = prior();
  return disassortative ? disassortative_affinity(c, p) : affinity_from_strength(c, epsilon, p);
}

BlockModelSpec SymmetricFamily::spec(int n) const { return BlockModelSpec(n, prior(), affinity()); }

}  // namespace sbm
