// Command-line front end: network generation, single runs, exact checks
// and parameter sweeps.

#include "sbm/bp.hpp"
#include "sbm/config.hpp"
#include "sbm/exact_oracle.hpp"
#include "sbm/experiment.hpp"
#include "sbm/local_classifiers.hpp"
#include "sbm/metrics.hpp"
#include "sbm/network_io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace sbm;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNotConverged = 3;

// Family flags shared by generate, sweep and hysteresis. Only flags the
// user actually passed override the config file.
struct FamilyFlags {
  std::optional<int> n, q;
  std::optional<double> c, epsilon, delta;
  std::optional<bool> disassortative;
  std::optional<std::vector<double>> zeta;

  void attach(CLI::App* app) {
    app->add_option("--n", n, "Number of nodes");
    app->add_option("--q", q, "Number of groups");
    app->add_option("--c", c, "Mean degree");
    app->add_option("--epsilon", epsilon, "c_in - c_out");
    app->add_option("--delta", delta, "Group-size asymmetry");
    app->add_option("--zeta", zeta, "Custom group-size offsets");
    app->add_flag("--disassortative", disassortative, "Planted coloring (c_in = 0)");
  }

  void apply(SymmetricFamily& f, int& nodes) const {
    if (n) nodes = *n;
    if (q) f.q = *q;
    if (c) f.c = *c;
    if (epsilon) f.epsilon = *epsilon;
    if (delta) f.delta = *delta;
    if (zeta) f.zeta = *zeta;
    if (disassortative) f.disassortative = *disassortative;
  }
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_matrix_csv(const Matrix& m, const char* header, std::ostream& out) {
  out << header << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < m.cols(); ++i) {
    for (Eigen::Index a = 0; a < m.rows(); ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", m(a, i));
      out << i << ',' << a << ',' << buf << '\n';
    }
  }
}

int cmd_generate(const std::string& config, const FamilyFlags& flags, std::optional<std::uint64_t> seed,
                 bool exact_sizes, const std::string& out) {
  GenerateConfig cfg = config.empty() ? GenerateConfig{} : parse_generate_config(read_text_file(config));
  flags.apply(cfg.family, cfg.n);
  if (seed) cfg.seed = *seed;
  if (exact_sizes) cfg.labels = LabelMode::ExactSizes;
  const Network net = sample_network(cfg.family.spec(cfg.n), cfg.seed, cfg.labels);
  if (out.empty() || out == "-") {
    write_network(net, std::cout);
  } else {
    write_network(net, fs::path(out));
  }
  return 0;
}

struct InferArgs {
  std::string network;
  std::string init = "random";
  std::uint64_t seed = 1;
  BpOptions bp;
  bool no_field = false;
  std::string out;
};

int cmd_infer(InferArgs a) {
  const Network net = parse_network(fs::path(a.network));
  a.bp.nonedge_field = !a.no_field;
  a.bp.order_seed = derive_seed(a.seed, 200);
  const InitMode mode{parse_init_kind(a.init), derive_seed(a.seed, 100)};
  auto [state, report] = run_to_convergence(net, mode, a.bp);

  nlohmann::json summary = nlohmann::json::parse(to_json(report));
  if (net.has_labels()) {
    const OverlapReport o = overlap_report(state.marginals, net.planted(), weak_limits(net.spec().prior));
    summary["Q"] = o.q;
    summary["Q_perm"] = o.q_perm;
    summary["Q_mu"] = o.q_mu;
  }
  if (a.out.empty()) {
    std::cout << summary.dump(2) << '\n';
  } else {
    const fs::path dir(a.out);
    fs::create_directories(dir);
    auto marg = open_out(dir / "marginals.csv");
    write_matrix_csv(state.marginals, "node,group,value", marg);
    auto msgs = open_out(dir / "messages.csv");
    msgs << "src,dst,group,value\n";
    char buf[32];
    for (int i = 0; i < net.n(); ++i) {
      for (auto e = net.edge_begin(i); e < net.edge_end(i); ++e) {
        for (int g = 0; g < net.q(); ++g) {
          std::snprintf(buf, sizeof buf, "%.17g", state.messages(g, e));
          msgs << i << ',' << net.target(e) << ',' << g << ',' << buf << '\n';
        }
      }
    }
    open_out(dir / "report.json") << summary.dump(2) << '\n';
  }
  if (!report.converged) {
    std::cerr << "not converged after " << report.sweeps << " sweeps (residual " << report.residual << ")\n";
    return kExitNotConverged;
  }
  return 0;
}

int cmd_classify(const std::string& network, int radius, int steps, const std::string& out) {
  const Network net = parse_network(fs::path(network));
  const auto& spec = net.spec();
  const Vector degrees = group_degrees(spec.affinity.matrix(), spec.prior.gamma());
  Matrix probs;
  if (steps >= 0) {
    probs = run_finite(net, steps).marginals;
  } else if (radius == 1) {
    probs = degree_classifier(net, spec.prior, degrees).probs;
  } else if (radius == 2) {
    probs = radius2_classifier(net, spec.prior, spec.affinity, degrees).probs;
  } else {
    throw InvalidParameter("radius must be 1 or 2");
  }
  if (out.empty() || out == "-") {
    write_matrix_csv(probs, "node,group,value", std::cout);
  } else {
    auto f = open_out(out);
    write_matrix_csv(probs, "node,group,value", f);
  }
  if (net.has_labels()) {
    const OverlapReport o = overlap_report(probs, net.planted(), weak_limits(spec.prior));
    std::cerr << "Q=" << o.q << " Q_mu=" << o.q_mu << '\n';
  }
  return 0;
}

int cmd_oracle(const std::string& network, const std::string& model, bool compare, const std::string& out) {
  const Network net = parse_network(fs::path(network));
  const WeightModel wm = parse_weight_model(model);
  const ExactPosterior exact = exact_posterior(net, wm);
  if (out.empty() || out == "-") {
    write_matrix_csv(exact.marginals, "node,group,value", std::cout);
  } else {
    auto f = open_out(out);
    write_matrix_csv(exact.marginals, "node,group,value", f);
  }
  std::cerr << "log_evidence=" << exact.log_evidence << '\n';
  if (compare) {
    BpOptions bp;
    bp.tol = 1e-12;
    bp.nonedge_field = wm != WeightModel::TreeOnly;
    const auto [state, report] = run_to_convergence(net, InitMode::prior(), bp);
    const double diff = (state.marginals - exact.marginals).cwiseAbs().maxCoeff();
    std::cerr << "bp_log_likelihood=" << report.log_likelihood << " max_marginal_diff=" << diff << '\n';
  }
  return 0;
}

int cmd_sweep(const std::string& config, const FamilyFlags& flags, std::optional<std::uint64_t> seed,
              std::optional<int> threads, std::optional<int> trials, const DiagnosisOptions& diag,
              const std::string& out) {
  if (config.empty()) throw InvalidParameter("sweep needs --config");
  SweepSpec spec = parse_sweep_spec(read_text_file(config));
  flags.apply(spec.family, spec.n);
  if (seed) spec.seed = *seed;
  if (threads) spec.threads = *threads;
  if (trials) spec.trials = *trials;
  for (const auto& problem : spec.validate()) std::cerr << "warning: " << problem << '\n';

  const auto records = sweep(spec);
  PhaseDiagnosis d;
  try {
    d = diagnose(records, diag);
  } catch (const InvalidParameter& e) {
    std::cerr << "diagnosis skipped: " << e.what() << '\n';
  }
  if (out.empty()) {
    write_records_csv(records, std::cout);
  } else {
    emit(records, d, spec, out);
  }
  return 0;
}

struct HysteresisArgs {
  std::string config;
  std::string axis = "c";
  double from = 18.0, to = 10.0, step = 0.25;
  std::optional<std::uint64_t> seed;
  double tol = 1e-6;
  int max_sweeps = 2000;
  double min_gap = 0.05;
  std::string out;
};

int cmd_hysteresis(const HysteresisArgs& a, const FamilyFlags& flags) {
  AdiabaticSpec spec;
  if (!a.config.empty()) {
    const GenerateConfig cfg = parse_generate_config(read_text_file(a.config));
    spec.family = cfg.family;
    spec.n = cfg.n;
    spec.seed = cfg.seed;
    spec.labels = cfg.labels;
  }
  flags.apply(spec.family, spec.n);
  if (a.seed) spec.seed = *a.seed;
  spec.axis = a.axis;
  spec.values = round_trip(a.from, a.to, a.step);
  spec.bp.tol = a.tol;
  spec.bp.max_sweeps = a.max_sweeps;

  const auto trajectory = adiabatic_sweep(spec);
  const HysteresisSummary s = summarize_hysteresis(trajectory, a.min_gap);
  if (a.out.empty()) {
    write_trajectory_csv(trajectory, std::cout);
  } else {
    const fs::path dir(a.out);
    fs::create_directories(dir);
    auto f = open_out(dir / "trajectory.csv");
    write_trajectory_csv(trajectory, f);
  }
  std::cerr << "loop_area=" << s.loop_area << " longest_run=" << s.longest_run << '\n';
  return 0;
}

int cmd_diagnose(const std::string& records_path, const DiagnosisOptions& diag, const std::string& out) {
  std::ifstream in(records_path);
  if (!in) throw InvalidParameter("cannot open " + records_path);
  const auto records = read_records_csv(in);
  const std::string text = to_json(diagnose(records, diag));
  if (out.empty() || out == "-") {
    std::cout << text << '\n';
  } else {
    open_out(out) << text << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Belief propagation for sparse stochastic block models"};
  app.require_subcommand(1);

  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads, trials;
  bool exact_sizes = false;

  FamilyFlags gen_flags;
  auto* gen = app.add_subcommand("generate", "Sample a network");
  gen->add_option("--config", config, "JSON generation config");
  gen_flags.attach(gen);
  gen->add_option("--seed", seed, "Master seed");
  gen->add_flag("--exact-sizes", exact_sizes, "Round group sizes instead of sampling labels");
  gen->add_option("--out", out, "Output network file (default stdout)");

  InferArgs infer_args;
  auto* inf = app.add_subcommand("infer", "Run BP on one network from one initialization");
  inf->add_option("--network", infer_args.network, "Network file")->required();
  inf->add_option("--init", infer_args.init, "random, prior or planted");
  inf->add_option("--seed", infer_args.seed, "Seed for random init and node order");
  inf->add_option("--tol", infer_args.bp.tol, "Convergence tolerance");
  inf->add_option("--max-sweeps", infer_args.bp.max_sweeps, "Sweep budget");
  inf->add_option("--damping", infer_args.bp.damping, "Weight of the previous message");
  inf->add_flag("--no-field", infer_args.no_field, "Drop the non-edge field");
  inf->add_option("--out", infer_args.out, "Output directory");

  std::string network;
  int radius = 1, steps = -1;
  auto* cls = app.add_subcommand("classify", "Local classifiers and finite-step BP");
  cls->add_option("--network", network, "Network file")->required();
  cls->add_option("--radius", radius, "1 (degree) or 2 (neighbor degrees)");
  cls->add_option("--steps", steps, "Run t synchronous BP steps from the prior instead");
  cls->add_option("--out", out, "Output CSV (default stdout)");

  std::string model = "tree";
  bool compare = false;
  auto* orc = app.add_subcommand("oracle", "Exact posterior by enumeration");
  orc->add_option("--network", network, "Network file")->required();
  orc->add_option("--model", model, "tree, poisson or bernoulli");
  orc->add_flag("--compare", compare, "Also run BP and report the difference");
  orc->add_option("--out", out, "Output CSV (default stdout)");

  FamilyFlags sweep_flags;
  DiagnosisOptions diag;
  auto* swp = app.add_subcommand("sweep", "Grid sweep with diagnosis");
  swp->add_option("--config", config, "JSON sweep config")->required();
  sweep_flags.attach(swp);
  swp->add_option("--seed", seed, "Master seed");
  swp->add_option("--threads", threads, "Worker threads");
  swp->add_option("--trials", trials, "Networks per cell");
  swp->add_option("--gap-threshold", diag.gap_threshold, "Coexistence gap threshold");
  swp->add_option("--min-cells", diag.transition.min_cells, "Minimum cells per row for jump detection");
  swp->add_option("--out", out, "Output directory");

  HysteresisArgs hyst;
  FamilyFlags hyst_flags;
  auto* hys = app.add_subcommand("hysteresis", "Adiabatic round trip along one parameter");
  hys->add_option("--config", hyst.config, "JSON generation config");
  hyst_flags.attach(hys);
  hys->add_option("--axis", hyst.axis, "epsilon, delta or c");
  hys->add_option("--from", hyst.from, "Start value");
  hys->add_option("--to", hyst.to, "Turning value");
  hys->add_option("--step", hyst.step, "Step size");
  hys->add_option("--seed", hyst.seed, "Master seed");
  hys->add_option("--tol", hyst.tol, "Convergence tolerance");
  hys->add_option("--max-sweeps", hyst.max_sweeps, "Sweep budget per step");
  hys->add_option("--min-gap", hyst.min_gap, "Branch gap counted as hysteresis");
  hys->add_option("--out", hyst.out, "Output directory");

  std::string records_path;
  auto* dia = app.add_subcommand("diagnose", "Diagnose an existing records.csv");
  dia->add_option("--records", records_path, "records.csv from a sweep")->required();
  dia->add_option("--gap-threshold", diag.gap_threshold, "Coexistence gap threshold");
  dia->add_option("--min-cells", diag.transition.min_cells, "Minimum cells per row for jump detection");
  dia->add_option("--out", out, "Output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*gen) return cmd_generate(config, gen_flags, seed, exact_sizes, out);
    if (*inf) return cmd_infer(infer_args);
    if (*cls) return cmd_classify(network, radius, steps, out);
    if (*orc) return cmd_oracle(network, model, compare, out);
    if (*swp) return cmd_sweep(config, sweep_flags, seed, threads, trials, diag, out);
    if (*hys) return cmd_hysteresis(hyst, hyst_flags);
    if (*dia) return cmd_diagnose(records_path, diag, out);
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
