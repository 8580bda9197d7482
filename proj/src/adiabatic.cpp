#include "sbm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <unordered_set>

namespace sbm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t pair_key(int i, int j) {
  if (i > j) std::swap(i, j);
  return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
}

// Expected number of edges between groups a and b under `spec`.
double expected_edges(const BlockModelSpec& spec, const std::vector<int>& sizes, int a, int b) {
  const double na = sizes[a];
  const double nb = sizes[b];
  const double pairs = a == b ? 0.5 * na * (na - 1.0) : na * nb;
  return spec.affinity(a, b) * pairs / spec.n;
}

}  // namespace

Network edit_network(const Network& net, const BlockModelSpec& target, std::uint64_t seed,
                     EditCounts* counts) {
  if (target.n != net.n() || target.q() != net.q()) {
    throw InvalidParameter("edit target must keep n and q");
  }
  if (target.affinity.matrix().maxCoeff() > target.n) {
    throw InvalidParameter("edit target has c_ab > n");
  }
  const int q = net.q();
  const auto& labels = net.planted();
  std::vector<std::vector<int>> members(q);
  for (int i = 0; i < net.n(); ++i) members[labels[i]].push_back(i);
  std::vector<int> sizes(q);
  for (int a = 0; a < q; ++a) sizes[a] = static_cast<int>(members[a].size());

  // present edges by unordered group pair
  std::vector<std::vector<Edge>> by_type(q * q);
  for (const auto& [i, j] : net.edges()) {
    int a = labels[i], b = labels[j];
    if (a > b) std::swap(a, b);
    by_type[a * q + b].push_back({i, j});
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::unordered_set<std::uint64_t> removed, present;
  std::vector<Edge> added;
  EditCounts tally;
  for (const auto& [i, j] : net.edges()) present.insert(pair_key(i, j));

  for (int a = 0; a < q; ++a) {
    for (int b = a; b < q; ++b) {
      const double change = expected_edges(target, sizes, a, b) - expected_edges(net.spec(), sizes, a, b);
      const double whole = std::floor(std::abs(change));
      const double frac = std::abs(change) - whole;
      auto k = static_cast<std::int64_t>(whole) + (unit(rng) < frac ? 1 : 0);
      if (change == 0.0 || k == 0) continue;

      auto& have = by_type[a * q + b];
      if (change < 0) {
        k = std::min<std::int64_t>(k, static_cast<std::int64_t>(have.size()));
        for (std::int64_t r = 0; r < k; ++r) {
          std::uniform_int_distribution<std::size_t> pick(r, have.size() - 1);
          std::swap(have[r], have[pick(rng)]);
          removed.insert(pair_key(have[r].first, have[r].second));
        }
        tally.removed += k;
      } else {
        const double na = sizes[a], nb = sizes[b];
        const double total = a == b ? 0.5 * na * (na - 1.0) : na * nb;
        const auto room = static_cast<std::int64_t>(total) - static_cast<std::int64_t>(have.size());
        k = std::min(k, room);
        if (k <= 0) continue;
        std::uniform_int_distribution<std::size_t> from_a(0, members[a].size() - 1);
        std::uniform_int_distribution<std::size_t> from_b(0, members[b].size() - 1);
        for (std::int64_t r = 0; r < k;) {
          const int i = members[a][from_a(rng)];
          const int j = members[b][from_b(rng)];
          if (i == j || !present.insert(pair_key(i, j)).second) continue;
          added.push_back({std::min(i, j), std::max(i, j)});
          ++r;
        }
        tally.added += k;
      }
    }
  }

  std::vector<Edge> edges;
  edges.reserve(net.edges().size() + added.size());
  for (const auto& e : net.edges()) {
    if (!removed.count(pair_key(e.first, e.second))) edges.push_back(e);
  }
  edges.insert(edges.end(), added.begin(), added.end());
  if (counts) *counts = tally;
  return Network(target, labels, std::move(edges));
}

MessageSet transfer_messages(const MessageSet& state, const Network& from, const Network& to) {
  if (from.n() != to.n() || from.q() != to.q()) {
    throw InvalidParameter("message transfer needs matching n and q");
  }
  MessageSet out;
  out.marginals = state.marginals;
  out.messages.resize(to.q(), to.directed_count());
  for (int i = 0; i < to.n(); ++i) {
    for (std::int64_t e = to.edge_begin(i); e < to.edge_end(i); ++e) {
      const auto old = from.directed_edge(i, to.target(e));
      out.messages.col(e) = old ? state.messages.col(*old) : state.marginals.col(i);
    }
  }
  out.field = state.field.size() && state.field.isZero(0.0)
                  ? Vector::Zero(to.q()).eval()
                  : compute_field(out.marginals, to.spec().affinity, to.n());
  return out;
}

std::vector<double> round_trip(double from, double to, double step) {
  if (!(step > 0.0)) throw InvalidParameter("round trip needs a positive step");
  const auto count = std::llround(std::abs(to - from) / step);
  const double dir = to < from ? -1.0 : 1.0;
  std::vector<double> v;
  for (long long k = 0; k <= count; ++k) v.push_back(from + dir * static_cast<double>(k) * step);
  for (long long k = count - 1; k >= 0; --k) v.push_back(from + dir * static_cast<double>(k) * step);
  return v;
}

std::vector<TrajectoryPoint> adiabatic_sweep(const AdiabaticSpec& spec) {
  if (spec.values.empty()) throw InvalidParameter("adiabatic sweep needs at least one value");
  if (spec.n < 1) throw InvalidParameter("n must be positive");

  // Branch 1 starts after the first reversal of direction.
  std::size_t turn = spec.values.size();
  for (std::size_t k = 1; k + 1 < spec.values.size(); ++k) {
    const double d0 = spec.values[k] - spec.values[k - 1];
    const double d1 = spec.values[k + 1] - spec.values[k];
    if (d0 * d1 < 0) {
      turn = k;
      break;
    }
  }

  std::vector<TrajectoryPoint> out;
  std::optional<Network> net;
  MessageSet state;
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    const SymmetricFamily family = with_parameter(spec.family, spec.axis, spec.values[k]);
    const BlockModelSpec target = family.spec(spec.n);
    TrajectoryPoint point;
    point.step = static_cast<int>(k);
    point.value = spec.values[k];
    point.branch = k > turn ? 1 : 0;

    BpOptions options = spec.bp;
    options.order_seed = derive_seed(spec.seed, 300 + k);
    if (!net) {
      net.emplace(sample_network(target, spec.seed, spec.labels));
      const InitMode mode{spec.start_init, derive_seed(spec.seed, 100 + static_cast<int>(spec.start_init))};
      state = init_messages(*net, mode, options.nonedge_field);
    } else {
      Network next = edit_network(*net, target, derive_seed(spec.seed, 1000 + k), &point.edits);
      state = transfer_messages(state, *net, next);
      net.emplace(std::move(next));
    }

    RunRecord& r = point.record;
    r.cell1 = static_cast<int>(k);
    r.axis1 = spec.values[k];
    r.axis2 = kNaN;
    r.q = family.q;
    r.n = spec.n;
    r.c = family.c;
    r.epsilon = family.disassortative ? target.affinity(0, 0) - (family.q > 1 ? target.affinity(0, 1) : 0.0)
                                      : family.epsilon;
    r.delta = family.delta;
    r.c_in = target.affinity(0, 0);
    r.c_out = family.q > 1 ? target.affinity(0, 1) : kNaN;
    r.disassortative = family.disassortative;
    r.seed = spec.seed;
    r.init = spec.start_init;
    const WeakLimits base = family_baseline(family);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.convergence = converge(state, *net, options);
      r.overlap = overlap_report(state.marginals, net->planted(), base);
    } catch (const DegenerateMessage& e) {
      // Keep going from a fresh prior state on the current network.
      r.error = e.what();
      r.overlap = {kNaN, kNaN, kNaN, base.overlap, base.marginal_overlap};
      r.convergence = {0, kNaN, false, kNaN};
      state = init_messages(*net, InitMode::prior(), options.nonedge_field);
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(point));
  }
  return out;
}

HysteresisSummary summarize_hysteresis(const std::vector<TrajectoryPoint>& trajectory, double min_gap,
                                       OverlapMeasure measure) {
  std::vector<std::pair<double, double>> legs[2];
  for (const auto& p : trajectory) {
    if (p.record.ok()) legs[p.branch].push_back({p.value, measure_of(p.record, measure)});
  }
  // the turning point closes the loop on both legs
  if (!legs[0].empty() && !legs[1].empty()) legs[1].push_back(legs[0].back());
  HysteresisSummary s;
  for (const auto& [x, qo] : legs[0]) {
    for (const auto& [y, qb] : legs[1]) {
      if (std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(x))) {
        s.x.push_back(x);
        s.outward.push_back(qo);
        s.back.push_back(qb);
        break;
      }
    }
  }
  std::vector<std::size_t> order(s.x.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s.x[a] < s.x[b]; });
  auto permute = [&](std::vector<double>& v) {
    std::vector<double> w;
    for (auto k : order) w.push_back(v[k]);
    v = std::move(w);
  };
  permute(s.x);
  permute(s.outward);
  permute(s.back);

  for (std::size_t k = 1; k < s.x.size(); ++k) {
    const double g0 = s.outward[k - 1] - s.back[k - 1];
    const double g1 = s.outward[k] - s.back[k];
    s.loop_area += 0.5 * (g0 + g1) * (s.x[k] - s.x[k - 1]);
  }
  int run = 0;
  for (std::size_t k = 1; k + 1 < s.x.size(); ++k) {
    run = s.outward[k] - s.back[k] >= min_gap ? run + 1 : 0;
    s.longest_run = std::max(s.longest_run, run);
  }
  return s;
}

}  // namespace sbm
