#pragma once

#include "sbm/graph_model.hpp"

#include <cstdint>
#include <string_view>
#include <utility>

namespace sbm {

enum class InitKind { Random, Prior, Planted };

struct InitMode {
  InitKind kind = InitKind::Random;
  std::uint64_t seed = 0;

  static InitMode random(std::uint64_t seed) { return {InitKind::Random, seed}; }
  static InitMode prior() { return {InitKind::Prior, 0}; }
  static InitMode planted() { return {InitKind::Planted, 0}; }
};

std::string_view to_string(InitKind kind);
InitKind parse_init_kind(std::string_view name);

struct BpOptions {
  double tol = 1e-6;
  int max_sweeps = 2000;
  /// Weight of the previous message in each update; 0 disables damping.
  double damping = 0.0;
  /// Multiply messages by exp(-h_a). Off gives the pure edge-factor model
  /// on which BP is exact for trees.
  bool nonedge_field = true;
  /// Seeds the node visiting order of asynchronous sweeps.
  std::uint64_t order_seed = 0;
};

/// Beliefs for one inference run.
///
/// Column e of `messages` is the message along directed edge e of the
/// network (see Network::reverse). Column i of `marginals` is node i's
/// belief. `field` holds h_a = sum_b c_ab * mean_k mu_b^k.
struct MessageSet {
  Matrix messages;
  Matrix marginals;
  Vector field;
};

struct ConvergenceReport {
  int sweeps = 0;
  double residual = 0.0;
  bool converged = false;
  double log_likelihood = 0.0;
};

/// Prior: every message and marginal equals gamma. Planted: indicators of
/// the planted labels. Random: i.i.d. uniform entries, normalized per
/// vector. The field is computed once from the initial marginals (and is
/// zero when `nonedge_field` is off).
MessageSet init_messages(const Network& net, InitMode mode, bool nonedge_field = true);

/// h_a = sum_b c_ab * (1/n) sum_k mu_b^k. The node average uses
/// compensated summation.
Vector compute_field(const Matrix& marginals, const AffinityMatrix& affinity, int n);

/// One asynchronous sweep in a seeded random node order. Returns the mean
/// absolute change over all message entries. Throws DegenerateMessage if a
/// normalizer vanishes.
double bp_sweep(MessageSet& state, const Network& net, std::uint64_t order_seed,
                const BpOptions& options = {});

/// Sweeps an existing state until the residual drops to `tol` or the sweep
/// budget is spent. Used directly for warm starts.
ConvergenceReport converge(MessageSet& state, const Network& net, const BpOptions& options = {});

std::pair<MessageSet, ConvergenceReport> run_to_convergence(const Network& net, InitMode mode,
                                                            const BpOptions& options = {});

/// Exactly t synchronous steps: every new message is computed from the
/// previous generation only. The field stays at its initial value, so the
/// step-t marginal of a node depends only on its radius-t neighborhood.
MessageSet run_finite(const Network& net, int t, InitMode mode = InitMode::prior(),
                      bool nonedge_field = true);

/// Joint belief mu_ab^{ij} = c_ab mu_a^{i->j} mu_b^{j->i} / Z_ij for an edge.
Matrix edge_marginal(const MessageSet& state, const Network& net, int i, int j);

/// Bethe log-likelihood
///
///   L = sum_i log Z_i - sum_(ij) log Z_ij
///       + (1/2n) [ M^T C M + sum_i mu^i^T C mu^i ],   M = sum_i mu^i,
///
/// where the last term is dropped when the field is off. With the field
/// off, L equals the log evidence on trees.
double log_likelihood(const MessageSet& state, const Network& net, bool nonedge_field = true);

}  // namespace sbm
