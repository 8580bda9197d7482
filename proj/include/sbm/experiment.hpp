#pragma once

#include "sbm/bp.hpp"
#include "sbm/graph_model.hpp"
#include "sbm/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sbm {

/// A swept parameter: "epsilon", "delta" or "c". Grid points are
/// start + k * step for k = 0..round((stop - start) / step).
struct Axis {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::vector<double> values() const;
};

/// Returns `family` with the named parameter set to `value`.
SymmetricFamily with_parameter(SymmetricFamily family, const std::string& name, double value);

struct SweepSpec {
  SymmetricFamily family;
  Axis axis1;
  std::optional<Axis> axis2;
  int n = 30000;
  int trials = 5;
  std::vector<InitKind> inits{InitKind::Random};
  /// Extra finite-step runs per init (one record per t).
  std::vector<int> finite_steps;
  double tol = 1e-6;
  int max_sweeps = 2000;
  std::uint64_t seed = 1;
  LabelMode labels = LabelMode::Multinomial;
  int threads = 1;

  /// Checks the family at every grid cell; returns one message per bad cell.
  std::vector<std::string> validate() const;
};

/// One experiment cell run. `steps` is -1 for a run to convergence and t
/// for a t-step finite run. A non-empty `error` flags a skipped or failed
/// run; its numeric fields are then NaN.
struct RunRecord {
  int cell1 = 0;
  int cell2 = 0;
  double axis1 = 0.0;
  double axis2 = 0.0;
  int q = 0;
  int n = 0;
  double c = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double c_in = 0.0;
  double c_out = 0.0;
  bool disassortative = false;
  int trial = 0;
  std::uint64_t seed = 0;
  InitKind init = InitKind::Random;
  int steps = -1;
  OverlapReport overlap;
  ConvergenceReport convergence;
  double wall_seconds = 0.0;
  std::string error;

  bool ok() const { return error.empty(); }
};

/// Weak-structure baselines for a family (closed form when equally spaced).
WeakLimits family_baseline(const SymmetricFamily& family);

/// Runs every grid cell x trial x init (x finite step). Within a cell and
/// trial all inits share one network. Output is in canonical order
/// (cell2, cell1, trial, init, steps) and deterministic given the seed.
std::vector<RunRecord> sweep(const SweepSpec& spec);

// ---- diagnosis --------------------------------------------------------

enum class OverlapMeasure { Q, QPerm, QMu };

double measure_of(const RunRecord& r, OverlapMeasure m);

struct CoexistenceCell {
  int cell1 = 0;
  double x = 0.0;
  double gap = 0.0;      // mean over trials of Q(planted) - Q(random)
  double delta_ll = 0.0;  // mean over trials of L(planted) - L(random)
  bool flagged = false;
};

struct CoexistenceRow {
  int row = 0;
  double y = 0.0;
  std::vector<CoexistenceCell> cells;
  bool any_flagged() const;
};

/// Pairs planted and random runs on the same networks. Throws
/// InvalidParameter if either init is missing.
std::vector<CoexistenceRow> dual_init_gap(const std::vector<RunRecord>& records,
                                          double gap_threshold = 0.05,
                                          OverlapMeasure measure = OverlapMeasure::Q);

struct CondensationRow {
  int row = 0;
  double y = 0.0;
  std::optional<double> crossing;
};

/// Sign change of L(planted) - L(random) along axis 1, searched only
/// inside contiguous coexistence spans.
std::vector<CondensationRow> condensation_scan(const std::vector<RunRecord>& records,
                                               double gap_threshold = 0.05,
                                               OverlapMeasure measure = OverlapMeasure::Q);

struct TransitionOptions {
  InitKind init = InitKind::Random;
  OverlapMeasure measure = OverlapMeasure::Q;
  double jump_factor = 3.0;
  double min_threshold = 0.0;
  int min_cells = 10;
};

struct TransitionRow {
  int row = 0;
  double y = 0.0;
  std::vector<double> x;
  std::vector<double> mean_overlap;
  std::vector<double> std_overlap;
  std::vector<double> mean_sweeps;
  /// Largest adjacent-cell step after removing the local trend (the mean
  /// of the steps two cells away on either side).
  double jump_height = 0.0;
  double jump_location = 0.0;
  double raw_jump = 0.0;
  /// Median across cells of the inter-trial standard deviation.
  double noise = 0.0;
  double threshold = 0.0;
  bool jump = false;
  double time_peak_location = 0.0;
  double time_peak = 0.0;
  bool locations_agree = true;
};

std::vector<TransitionRow> transition_scan(const std::vector<RunRecord>& records,
                                           const TransitionOptions& options = {});

struct PhaseDiagnosis {
  std::vector<CoexistenceRow> coexistence;
  std::vector<CondensationRow> condensation;
  std::vector<TransitionRow> transitions;
};

struct DiagnosisOptions {
  double gap_threshold = 0.05;
  TransitionOptions transition;
};

/// Runs every diagnosis the records support (coexistence and
/// condensation need both random and planted inits).
PhaseDiagnosis diagnose(const std::vector<RunRecord>& records, const DiagnosisOptions& options = {});

// ---- adiabatic sweeps -------------------------------------------------

struct EditCounts {
  std::int64_t added = 0;
  std::int64_t removed = 0;
};

/// Minimal edit of `net` towards `target`: for each group pair the change
/// in expected edge count is rounded stochastically, then that many absent
/// pairs are added or present edges removed, uniformly. Labels are kept.
Network edit_network(const Network& net, const BlockModelSpec& target, std::uint64_t seed,
                     EditCounts* counts = nullptr);

/// Carries beliefs over to an edited network. Messages on surviving edges
/// are copied; new edges start from the sender's marginal.
MessageSet transfer_messages(const MessageSet& state, const Network& from, const Network& to);

struct AdiabaticSpec {
  SymmetricFamily family;
  std::string axis = "c";
  std::vector<double> values;
  int n = 30000;
  std::uint64_t seed = 1;
  BpOptions bp;
  InitKind start_init = InitKind::Planted;
  LabelMode labels = LabelMode::Multinomial;
};

/// Grid from `from` to `to` and back, excluding the repeated turning point.
std::vector<double> round_trip(double from, double to, double step);

struct TrajectoryPoint {
  int step = 0;
  double value = 0.0;
  int branch = 0;  // 0 on the outward leg, 1 on the return leg
  EditCounts edits;
  RunRecord record;
};

/// Follows one network through `values`, warm-starting BP at each step
/// from the previous beliefs. Non-converged steps are recorded and the
/// trajectory continues.
std::vector<TrajectoryPoint> adiabatic_sweep(const AdiabaticSpec& spec);

struct HysteresisSummary {
  std::vector<double> x;         // parameter values present on both legs, ascending
  std::vector<double> outward;   // Q on the outward leg
  std::vector<double> back;      // Q on the return leg
  double loop_area = 0.0;        // trapezoid integral of (outward - back)
  int longest_run = 0;           // consecutive interior points with outward - back >= min_gap
};

HysteresisSummary summarize_hysteresis(const std::vector<TrajectoryPoint>& trajectory,
                                       double min_gap = 0.05,
                                       OverlapMeasure measure = OverlapMeasure::Q);

// ---- emission ---------------------------------------------------------

/// Writes records.csv, timings.csv, diagnosis.json and sweep_spec.json
/// into `dir` (created if needed).
void emit(const std::vector<RunRecord>& records, const PhaseDiagnosis& diagnosis,
          const SweepSpec& spec, const std::filesystem::path& dir);

void write_records_csv(const std::vector<RunRecord>& records, std::ostream& out);
std::vector<RunRecord> read_records_csv(std::istream& in);
void write_trajectory_csv(const std::vector<TrajectoryPoint>& trajectory, std::ostream& out);

}  // namespace sbm
