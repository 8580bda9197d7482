#include "sbm/bp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace sbm {

std::string_view to_string(InitKind kind) {
  switch (kind) {
    case InitKind::Random: return "random";
    case InitKind::Prior: return "prior";
    case InitKind::Planted: return "planted";
  }
  return "unknown";
}

InitKind parse_init_kind(std::string_view name) {
  if (name == "random") return InitKind::Random;
  if (name == "prior") return InitKind::Prior;
  if (name == "planted") return InitKind::Planted;
  throw InvalidParameter("unknown init mode '" + std::string(name) + "'");
}

namespace {

// Products leaving this band are rescaled; the scale never matters for
// normalized messages.
constexpr double kRescaleHigh = 1e100;
constexpr double kRescaleLow = 1e-100;
// Below this fraction of the prefix and suffix scales the cavity product is
// recomputed in logs.
constexpr double kCombineLow = 1e-200;
// Also when the normalizer itself is this small (1 / z must stay finite).
constexpr double kNormalizerLow = 1e-280;
// Smallest stored message entry. Without it a strongly polarized message
// rounds to exactly one-hot, and with a zero diagonal in c the receiving
// node can then see every group excluded. Together with kRescaleLow this
// keeps every positive product above the double range limit.
constexpr double kMessageFloor = 1e-200;

// Neumaier-compensated mean over the columns of `values`.
Vector column_mean(const Matrix& values) {
  const auto q = values.rows();
  Vector sum = Vector::Zero(q);
  Vector comp = Vector::Zero(q);
  for (Eigen::Index i = 0; i < values.cols(); ++i) {
    for (Eigen::Index a = 0; a < q; ++a) {
      const double x = values(a, i);
      const double t = sum[a] + x;
      comp[a] += std::abs(sum[a]) >= std::abs(x) ? (sum[a] - t) + x : (x - t) + sum[a];
      sum[a] = t;
    }
  }
  return (sum + comp) / static_cast<double>(values.cols());
}

// Scratch space and arithmetic for one node update. Q > 0 fixes the group
// count at compile time so the inner loops unroll; Q = 0 handles any q.
// Messages are read and written through raw column pointers (stride q).
template <int Q>
struct NodeKernel {
  NodeKernel(const Network& net, const Matrix& affinity)
      : q(static_cast<int>(affinity.rows())),
        c(q * q),
        incoming(static_cast<std::size_t>(q) * std::max(1, net.max_degree())),
        prefix(static_cast<std::size_t>(q) * (net.max_degree() + 1)),
        suffix(static_cast<std::size_t>(q) * (net.max_degree() + 1)),
        out(q) {
    for (int a = 0; a < q; ++a) {
      for (int b = 0; b < q; ++b) c[a * q + b] = affinity(a, b);
    }
  }

  int dim() const {
    if constexpr (Q > 0) {
      return Q;
    } else {
      return q;
    }
  }

  static void rescale_if_needed(double* v, int qq) {
    double mx = 0.0;
    for (int a = 0; a < qq; ++a) mx = std::max(mx, v[a]);
    if (mx > 0.0 && (mx > kRescaleHigh || mx < kRescaleLow)) {
      const double inv = 1.0 / mx;
      for (int a = 0; a < qq; ++a) v[a] *= inv;
    }
  }

  // Incoming factors f_k(a) = sum_b c_ab mu_b^{k->i} for every neighbor k.
  void gather(const Network& net, int i, const double* src) {
    const int qq = dim();
    const auto rev = net.reverse_block(i);
    const double* cm = c.data();
    for (std::size_t k = 0; k < rev.size(); ++k) {
      const double* x = src + rev[k] * qq;
      double* f = incoming.data() + k * qq;
      for (int a = 0; a < qq; ++a) {
        double s = 0.0;
        for (int b = 0; b < qq; ++b) s += cm[a * qq + b] * x[b];
        f[a] = s;
      }
    }
  }

  // Random node order defeats the hardware prefetcher; touching the next
  // node's incoming messages early hides most of the latency.
  static void prefetch(const Network& net, int i, const double* src, int qq) {
    for (auto r : net.reverse_block(i)) __builtin_prefetch(src + r * qq);
  }

  // Recomputes all messages leaving node i from `src` into `dst` and the
  // node's marginal into `marginal`. Returns the summed absolute change of
  // the written messages.
  double update(const Network& net, int i, const double* base, const double* src, double* dst,
                double* marginal, double damping) {
    const int qq = dim();
    const int d = net.degree(i);
    const auto e0 = net.edge_begin(i);
    gather(net, i, src);

    std::copy_n(base, qq, prefix.data());
    for (int k = 0; k < d; ++k) {
      const double* p = prefix.data() + k * qq;
      const double* f = incoming.data() + k * qq;
      double* next = prefix.data() + (k + 1) * qq;
      for (int a = 0; a < qq; ++a) next[a] = p[a] * f[a];
      rescale_if_needed(next, qq);
    }
    std::fill_n(suffix.data() + d * qq, qq, 1.0);
    for (int k = d - 1; k >= 0; --k) {
      const double* s = suffix.data() + (k + 1) * qq;
      const double* f = incoming.data() + k * qq;
      double* next = suffix.data() + k * qq;
      for (int a = 0; a < qq; ++a) next[a] = s[a] * f[a];
      rescale_if_needed(next, qq);
    }

    double change = 0.0;
    double* o = out.data();
    for (int k = 0; k < d; ++k) {
      const double* p = prefix.data() + k * qq;
      const double* s = suffix.data() + (k + 1) * qq;
      double z = 0.0, pmax = 0.0, smax = 0.0;
      for (int a = 0; a < qq; ++a) {
        o[a] = p[a] * s[a];
        z += o[a];
        pmax = std::max(pmax, p[a]);
        smax = std::max(smax, s[a]);
      }
      // prefix and suffix are scaled separately; when they favor different
      // groups the underflowed entries can wipe out the whole product
      if (!(z > std::max(kCombineLow * pmax * smax, kNormalizerLow)) && pmax > 0.0 && smax > 0.0) {
        z = cavity_in_logs(i, d, k, base);
      }
      if (!(z > 0.0) || !std::isfinite(z)) throw DegenerateMessage(i, net.target(e0 + k));
      const double inv = 1.0 / z;
      double* m = dst + (e0 + k) * qq;
      for (int a = 0; a < qq; ++a) {
        double v = std::max(o[a] * inv, kMessageFloor);
        if (damping > 0.0) v = (1.0 - damping) * v + damping * m[a];
        change += std::abs(v - m[a]);
        m[a] = v;
      }
    }

    const double* full = prefix.data() + d * qq;
    double z = 0.0;
    for (int a = 0; a < qq; ++a) z += full[a];
    if (!(z > 0.0) || !std::isfinite(z)) throw DegenerateMessage(i, -1);
    for (int a = 0; a < qq; ++a) marginal[a] = full[a] / z;
    return change;
  }

  // Slow path: out = base * prod_{k' != skip} f_k', in logs, scaled so the
  // largest entry is 1. Returns the sum of `out`.
  double cavity_in_logs(int i, int d, int skip, const double* base) {
    const int qq = dim();
    double* o = out.data();
    double mx = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < qq; ++a) {
      double s = std::log(base[a]);
      for (int k = 0; k < d; ++k) {
        if (k != skip) s += std::log(incoming[k * qq + a]);
      }
      o[a] = s;
      mx = std::max(mx, s);
    }
    if (!std::isfinite(mx)) throw DegenerateMessage(i, -1);
    double z = 0.0;
    for (int a = 0; a < qq; ++a) {
      o[a] = std::exp(o[a] - mx);
      z += o[a];
    }
    return z;
  }

  // log of sum_a base_a prod_k f_k(a), accumulated with an explicit scale.
  double log_normalizer(const Network& net, int i, const double* base, const double* src) {
    const int qq = dim();
    gather(net, i, src);
    std::vector<double> prod(base, base + qq);
    double log_scale = 0.0;
    for (int k = 0; k < net.degree(i); ++k) {
      double mx = 0.0;
      for (int a = 0; a < qq; ++a) {
        prod[a] *= incoming[k * qq + a];
        mx = std::max(mx, prod[a]);
      }
      if (mx > 0.0) {
        for (int a = 0; a < qq; ++a) prod[a] /= mx;
        log_scale += std::log(mx);
      }
    }
    double z = 0.0;
    for (int a = 0; a < qq; ++a) z += prod[a];
    if (!(z > 0.0)) throw DegenerateMessage(i, -1);
    return std::log(z) + log_scale;
  }

  int q;
  std::vector<double> c;  // row-major copy of the affinity
  std::vector<double> incoming;
  std::vector<double> prefix;
  std::vector<double> suffix;
  std::vector<double> out;
};

// Calls f with a kernel specialized for small q.
template <typename F>
decltype(auto) with_kernel(const Network& net, F&& f) {
  const Matrix& c = net.spec().affinity.matrix();
  switch (net.q()) {
    case 2: return f(NodeKernel<2>(net, c));
    case 3: return f(NodeKernel<3>(net, c));
    case 4: return f(NodeKernel<4>(net, c));
    case 5: return f(NodeKernel<5>(net, c));
    default: return f(NodeKernel<0>(net, c));
  }
}

Vector field_weights(const GroupPrior& prior, const Vector& field) {
  return prior.gamma().array() * (-field.array()).exp();
}

}  // namespace

Vector compute_field(const Matrix& marginals, const AffinityMatrix& affinity, int n) {
  if (marginals.cols() != n) throw InvalidParameter("marginal count differs from n");
  return affinity.matrix() * column_mean(marginals);
}

MessageSet init_messages(const Network& net, InitMode mode, bool nonedge_field) {
  const int q = net.q();
  const int n = net.n();
  const auto directed = net.directed_count();
  const Vector& gamma = net.spec().prior.gamma();
  MessageSet state;
  switch (mode.kind) {
    case InitKind::Prior:
      state.messages = gamma.replicate(1, directed);
      state.marginals = gamma.replicate(1, n);
      break;
    case InitKind::Planted: {
      if (!net.has_labels()) throw InvalidParameter("planted initialization needs planted labels");
      state.messages = Matrix::Zero(q, directed);
      state.marginals = Matrix::Zero(q, n);
      for (int i = 0; i < n; ++i) {
        const int s = net.planted()[i];
        state.marginals(s, i) = 1.0;
        for (auto e = net.edge_begin(i); e < net.edge_end(i); ++e) state.messages(s, e) = 1.0;
      }
      break;
    }
    case InitKind::Random: {
      std::mt19937_64 rng(mode.seed);
      std::uniform_real_distribution<double> unit(std::nextafter(0.0, 1.0), 1.0);
      auto fill = [&](Matrix& m) {
        for (Eigen::Index col = 0; col < m.cols(); ++col) {
          for (int a = 0; a < q; ++a) m(a, col) = unit(rng);
          m.col(col) /= m.col(col).sum();
        }
      };
      state.messages.resize(q, directed);
      state.marginals.resize(q, n);
      fill(state.messages);
      fill(state.marginals);
      break;
    }
  }
  state.field = nonedge_field ? compute_field(state.marginals, net.spec().affinity, n)
                              : Vector::Zero(q).eval();
  return state;
}

double bp_sweep(MessageSet& state, const Network& net, std::uint64_t order_seed,
                const BpOptions& options) {
  const int n = net.n();
  const int q = net.q();
  const Matrix& c = net.spec().affinity.matrix();
  const GroupPrior& prior = net.spec().prior;

  Vector mean_marginal = options.nonedge_field ? column_mean(state.marginals) : Vector::Zero(q);
  Vector field = options.nonedge_field ? (c * mean_marginal).eval() : Vector::Zero(q).eval();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(order_seed);
  std::shuffle(order.begin(), order.end(), rng);

  double* messages = state.messages.data();
  const double change = with_kernel(net, [&](auto&& kernel) {
    Vector base = field_weights(prior, field);
    Vector previous(q);
    double sum = 0.0;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const int i = order[pos];
      if (pos + 2 < order.size()) __builtin_prefetch(net.reverse_block(order[pos + 2]).data());
      if (pos + 1 < order.size()) kernel.prefetch(net, order[pos + 1], messages, q);
      previous = state.marginals.col(i);
      sum += kernel.update(net, i, base.data(), messages, messages, state.marginals.col(i).data(),
                           options.damping);
      if (options.nonedge_field) {
        mean_marginal += (state.marginals.col(i) - previous) / static_cast<double>(n);
        field.noalias() = c * mean_marginal;
        base = field_weights(prior, field);
      }
    }
    return sum;
  });
  state.field = options.nonedge_field ? compute_field(state.marginals, net.spec().affinity, n)
                                      : Vector::Zero(q).eval();
  const auto entries = static_cast<double>(net.directed_count()) * q;
  return entries > 0 ? change / entries : 0.0;
}

ConvergenceReport converge(MessageSet& state, const Network& net, const BpOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidParameter("tolerance must be positive");
  ConvergenceReport report;
  report.residual = std::numeric_limits<double>::infinity();
  while (report.sweeps < options.max_sweeps) {
    ++report.sweeps;
    report.residual = bp_sweep(state, net, derive_seed(options.order_seed, report.sweeps), options);
    if (report.residual <= options.tol) {
      report.converged = true;
      break;
    }
  }
  report.log_likelihood = log_likelihood(state, net, options.nonedge_field);
  return report;
}

std::pair<MessageSet, ConvergenceReport> run_to_convergence(const Network& net, InitMode mode,
                                                            const BpOptions& options) {
  MessageSet state = init_messages(net, mode, options.nonedge_field);
  ConvergenceReport report = converge(state, net, options);
  return {std::move(state), report};
}

MessageSet run_finite(const Network& net, int t, InitMode mode, bool nonedge_field) {
  if (t < 0) throw InvalidParameter("step count must be non-negative");
  MessageSet state = init_messages(net, mode, nonedge_field);
  const Vector base = field_weights(net.spec().prior, state.field);
  Matrix next_messages(state.messages.rows(), state.messages.cols());
  Matrix next_marginals(state.marginals.rows(), state.marginals.cols());
  with_kernel(net, [&](auto&& kernel) {
    for (int step = 0; step < t; ++step) {
      next_messages = state.messages;
      for (int i = 0; i < net.n(); ++i) {
        kernel.update(net, i, base.data(), state.messages.data(), next_messages.data(),
                      next_marginals.col(i).data(), 0.0);
      }
      state.messages.swap(next_messages);
      state.marginals.swap(next_marginals);
    }
  });
  return state;
}

Matrix edge_marginal(const MessageSet& state, const Network& net, int i, int j) {
  const auto e = net.directed_edge(i, j);
  if (!e) throw InvalidParameter("(" + std::to_string(i) + "," + std::to_string(j) + ") is not an edge");
  const auto forward = state.messages.col(*e);
  const auto backward = state.messages.col(net.reverse(*e));
  Matrix joint = net.spec().affinity.matrix().cwiseProduct(forward * backward.transpose());
  const double z = joint.sum();
  if (!(z > 0.0)) throw DegenerateMessage(i, j);
  return joint / z;
}

double log_likelihood(const MessageSet& state, const Network& net, bool nonedge_field) {
  const int n = net.n();
  const Matrix& c = net.spec().affinity.matrix();
  const Vector field = nonedge_field ? state.field : Vector::Zero(net.q()).eval();
  const Vector base = field_weights(net.spec().prior, field);

  const double node_terms = with_kernel(net, [&](auto&& kernel) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += kernel.log_normalizer(net, i, base.data(), state.messages.data());
    return sum;
  });

  double edge_terms = 0.0;
  for (int i = 0; i < n; ++i) {
    for (auto e = net.edge_begin(i); e < net.edge_end(i); ++e) {
      if (net.target(e) < i) continue;
      const double z = state.messages.col(e).dot(c * state.messages.col(net.reverse(e)));
      if (!(z > 0.0)) throw DegenerateMessage(i, net.target(e));
      edge_terms += std::log(z);
    }
  }

  double pair_term = 0.0;
  if (nonedge_field) {
    const Vector total = state.marginals.rowwise().sum();
    const double self = (state.marginals.transpose() * c).cwiseProduct(state.marginals.transpose()).sum();
    pair_term = (total.dot(c * total) + self) / (2.0 * n);
  }
  return node_terms - edge_terms + pair_term;
}

}  // namespace sbm
