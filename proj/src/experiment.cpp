#include "sbm/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

namespace sbm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t cell_seed(std::uint64_t master, int cell1, int cell2, int trial) {
  return derive_seed(derive_seed(derive_seed(master, static_cast<std::uint64_t>(cell2)),
                                 static_cast<std::uint64_t>(cell1)),
                     static_cast<std::uint64_t>(trial));
}

RunRecord describe(const SymmetricFamily& f, int n) {
  RunRecord r;
  r.q = f.q;
  r.n = n;
  r.c = f.c;
  r.epsilon = f.epsilon;
  r.delta = f.delta;
  r.disassortative = f.disassortative;
  r.c_in = r.c_out = kNaN;
  return r;
}

void mark_failed(RunRecord& r, const std::string& why) {
  r.error = why.empty() ? "failed" : why;
  r.overlap = {kNaN, kNaN, kNaN, r.overlap.baseline_q, r.overlap.baseline_qmu};
  r.convergence = {0, kNaN, false, kNaN};
}

}  // namespace

std::vector<double> Axis::values() const {
  if (!(step > 0.0)) throw InvalidParameter("axis '" + name + "' needs a positive step");
  const auto count = std::llround((stop - start) / step);
  if (count < 0) throw InvalidParameter("axis '" + name + "' has an empty range");
  std::vector<double> v;
  for (long long k = 0; k <= count; ++k) v.push_back(start + static_cast<double>(k) * step);
  return v;
}

SymmetricFamily with_parameter(SymmetricFamily family, const std::string& name, double value) {
  if (name == "epsilon") {
    family.epsilon = value;
  } else if (name == "delta") {
    family.delta = value;
  } else if (name == "c") {
    family.c = value;
  } else {
    throw InvalidParameter("unknown sweep parameter '" + name + "' (expected epsilon, delta or c)");
  }
  return family;
}

WeakLimits family_baseline(const SymmetricFamily& family) {
  if (family.equally_spaced()) return weak_limits(family.q, family.delta);
  return weak_limits(family.prior());
}

std::vector<std::string> SweepSpec::validate() const {
  if (n < 1) throw InvalidParameter("n must be positive");
  if (trials < 1) throw InvalidParameter("trials must be positive");
  if (inits.empty() && finite_steps.empty()) throw InvalidParameter("no init modes requested");
  if (inits.empty()) throw InvalidParameter("no init modes requested");
  for (int t : finite_steps) {
    if (t < 0) throw InvalidParameter("finite step counts must be non-negative");
  }
  const auto xs = axis1.values();
  const auto ys = axis2 ? axis2->values() : std::vector<double>{0.0};
  std::vector<std::string> problems;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      SymmetricFamily f = with_parameter(family, axis1.name, xs[i]);
      if (axis2) f = with_parameter(f, axis2->name, ys[j]);
      try {
        const BlockModelSpec s = f.spec(n);
        if (s.affinity.matrix().maxCoeff() > n) throw InvalidParameter("c_ab exceeds n");
      } catch (const InvalidParameter& e) {
        problems.push_back("cell (" + std::to_string(i) + "," + std::to_string(j) + "): " + e.what());
      }
    }
  }
  return problems;
}

namespace {

std::vector<RunRecord> run_job(const SweepSpec& spec, int cell1, int cell2, double x, double y,
                               int trial) {
  SymmetricFamily family = with_parameter(spec.family, spec.axis1.name, x);
  if (spec.axis2) family = with_parameter(family, spec.axis2->name, y);

  RunRecord proto = describe(family, spec.n);
  proto.cell1 = cell1;
  proto.cell2 = cell2;
  proto.axis1 = x;
  proto.axis2 = spec.axis2 ? y : kNaN;
  proto.trial = trial;
  proto.seed = cell_seed(spec.seed, cell1, cell2, trial);

  std::vector<int> modes{-1};
  modes.insert(modes.end(), spec.finite_steps.begin(), spec.finite_steps.end());

  std::vector<RunRecord> out;
  auto flag_all = [&](const std::string& why) {
    for (InitKind init : spec.inits) {
      for (int steps : modes) {
        RunRecord r = proto;
        r.init = init;
        r.steps = steps;
        mark_failed(r, why);
        out.push_back(std::move(r));
      }
    }
  };

  std::optional<Network> net;
  try {
    const BlockModelSpec bms = family.spec(spec.n);
    proto.c_in = bms.affinity(0, 0);
    proto.c_out = bms.q() > 1 ? bms.affinity(0, 1) : kNaN;
    if (family.disassortative) proto.epsilon = proto.c_in - proto.c_out;
    const WeakLimits base = family_baseline(family);
    proto.overlap.baseline_q = base.overlap;
    proto.overlap.baseline_qmu = base.marginal_overlap;
    net.emplace(sample_network(bms, proto.seed, spec.labels));
  } catch (const InvalidParameter& e) {
    flag_all(e.what());
    return out;
  }

  const WeakLimits base{proto.overlap.baseline_q, proto.overlap.baseline_qmu};
  BpOptions options;
  options.tol = spec.tol;
  options.max_sweeps = spec.max_sweeps;
  options.order_seed = derive_seed(proto.seed, 200);

  for (std::size_t k = 0; k < spec.inits.size(); ++k) {
    const InitMode mode{spec.inits[k], derive_seed(proto.seed, 100 + static_cast<int>(spec.inits[k]))};
    for (int steps : modes) {
      RunRecord r = proto;
      r.init = mode.kind;
      r.steps = steps;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        if (steps < 0) {
          auto [state, report] = run_to_convergence(*net, mode, options);
          r.convergence = report;
          r.overlap = overlap_report(state.marginals, net->planted(), base);
        } else {
          const MessageSet state = run_finite(*net, steps, mode);
          r.convergence = {steps, kNaN, false, log_likelihood(state, *net)};
          r.overlap = overlap_report(state.marginals, net->planted(), base);
        }
      } catch (const DegenerateMessage& e) {
        mark_failed(r, e.what());
      }
      r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace

std::vector<RunRecord> sweep(const SweepSpec& spec) {
  spec.validate();
  const auto xs = spec.axis1.values();
  const auto ys = spec.axis2 ? spec.axis2->values() : std::vector<double>{0.0};

  struct Job {
    int cell1, cell2, trial;
  };
  std::vector<Job> jobs;
  for (int j = 0; j < static_cast<int>(ys.size()); ++j) {
    for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
      for (int t = 0; t < spec.trials; ++t) jobs.push_back({i, j, t});
    }
  }

  std::vector<std::vector<RunRecord>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const Job& job = jobs[k];
      results[k] = run_job(spec, job.cell1, job.cell2, xs[job.cell1], ys[job.cell2], job.trial);
    }
  };
  const int threads = std::max(1, std::min<int>(spec.threads, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<RunRecord> records;
  for (auto& chunk : results) {
    for (auto& r : chunk) records.push_back(std::move(r));
  }
  return records;
}

double measure_of(const RunRecord& r, OverlapMeasure m) {
  switch (m) {
    case OverlapMeasure::Q: return r.overlap.q;
    case OverlapMeasure::QPerm: return r.overlap.q_perm;
    case OverlapMeasure::QMu: return r.overlap.q_mu;
  }
  return kNaN;
}

}  // namespace sbm
