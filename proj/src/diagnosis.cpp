#include "sbm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace sbm {
namespace {

// Converged, error-free records of one init, keyed by (row, cell, trial).
using Keyed = std::map<std::tuple<int, int, int>, const RunRecord*>;

Keyed index_by_cell(const std::vector<RunRecord>& records, InitKind init) {
  Keyed out;
  for (const auto& r : records) {
    if (r.ok() && r.steps < 0 && r.init == init) out[{r.cell2, r.cell1, r.trial}] = &r;
  }
  return out;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

bool CoexistenceRow::any_flagged() const {
  return std::any_of(cells.begin(), cells.end(), [](const auto& c) { return c.flagged; });
}

std::vector<CoexistenceRow> dual_init_gap(const std::vector<RunRecord>& records, double gap_threshold,
                                          OverlapMeasure measure) {
  const Keyed planted = index_by_cell(records, InitKind::Planted);
  const Keyed random = index_by_cell(records, InitKind::Random);
  if (planted.empty() || random.empty()) {
    throw InvalidParameter("coexistence diagnosis needs both planted and random runs");
  }

  // (row, cell) -> paired differences
  std::map<std::pair<int, int>, std::pair<std::vector<double>, std::vector<double>>> diffs;
  std::map<std::pair<int, int>, std::pair<double, double>> coords;
  for (const auto& [key, p] : planted) {
    const auto it = random.find(key);
    if (it == random.end()) continue;
    const RunRecord* r = it->second;
    auto& [gaps, lls] = diffs[{p->cell2, p->cell1}];
    gaps.push_back(measure_of(*p, measure) - measure_of(*r, measure));
    lls.push_back(p->convergence.log_likelihood - r->convergence.log_likelihood);
    coords[{p->cell2, p->cell1}] = {p->axis1, p->axis2};
  }

  std::vector<CoexistenceRow> rows;
  for (const auto& [key, d] : diffs) {
    const auto [row, cell] = key;
    if (rows.empty() || rows.back().row != row) {
      rows.push_back({row, coords[key].second, {}});
    }
    CoexistenceCell c;
    c.cell1 = cell;
    c.x = coords[key].first;
    c.gap = mean(d.first);
    c.delta_ll = mean(d.second);
    c.flagged = c.gap > gap_threshold;
    rows.back().cells.push_back(c);
  }
  return rows;
}

std::vector<CondensationRow> condensation_scan(const std::vector<RunRecord>& records,
                                               double gap_threshold, OverlapMeasure measure) {
  std::vector<CondensationRow> out;
  for (const auto& row : dual_init_gap(records, gap_threshold, measure)) {
    CondensationRow result{row.row, row.y, std::nullopt};
    const auto& cells = row.cells;
    for (std::size_t k = 0; k + 1 < cells.size() && !result.crossing; ++k) {
      const auto& a = cells[k];
      const auto& b = cells[k + 1];
      if (!a.flagged || !b.flagged || b.cell1 != a.cell1 + 1) continue;
      if (std::signbit(a.delta_ll) == std::signbit(b.delta_ll)) continue;
      const double t = a.delta_ll / (a.delta_ll - b.delta_ll);
      result.crossing = a.x + t * (b.x - a.x);
    }
    out.push_back(result);
  }
  return out;
}

std::vector<TransitionRow> transition_scan(const std::vector<RunRecord>& records,
                                           const TransitionOptions& options) {
  const Keyed runs = index_by_cell(records, options.init);
  // row -> cell -> (x, y, overlaps, sweeps)
  struct Cell {
    double x = 0.0, y = 0.0;
    std::vector<double> overlaps, sweeps;
  };
  std::map<int, std::map<int, Cell>> grid;
  for (const auto& [key, r] : runs) {
    Cell& c = grid[r->cell2][r->cell1];
    c.x = r->axis1;
    c.y = r->axis2;
    c.overlaps.push_back(measure_of(*r, options.measure));
    c.sweeps.push_back(r->convergence.sweeps);
  }

  std::vector<TransitionRow> out;
  for (const auto& [row_index, cells] : grid) {
    if (static_cast<int>(cells.size()) < options.min_cells) {
      throw InvalidParameter("transition scan needs at least " + std::to_string(options.min_cells) +
                             " cells per row, got " + std::to_string(cells.size()));
    }
    TransitionRow row;
    row.row = row_index;
    row.y = cells.begin()->second.y;
    std::vector<double> stds;
    for (const auto& [k, c] : cells) {
      row.x.push_back(c.x);
      row.mean_overlap.push_back(mean(c.overlaps));
      row.std_overlap.push_back(sample_std(c.overlaps));
      row.mean_sweeps.push_back(mean(c.sweeps));
    }
    row.noise = median(row.std_overlap);
    row.threshold = std::max(options.jump_factor * row.noise, options.min_threshold);

    const auto& m = row.mean_overlap;
    const int steps = static_cast<int>(m.size()) - 1;
    auto delta = [&](int k) { return m[k + 1] - m[k]; };
    for (int k = 0; k < steps; ++k) {
      double trend = 0.0;
      int used = 0;
      for (int j : {k - 2, k + 2}) {
        if (j >= 0 && j < steps) {
          trend += delta(j);
          ++used;
        }
      }
      if (used) trend /= used;
      const double excess = std::abs(delta(k) - trend);
      row.raw_jump = std::max(row.raw_jump, std::abs(delta(k)));
      if (excess > row.jump_height) {
        row.jump_height = excess;
        row.jump_location = 0.5 * (row.x[k] + row.x[k + 1]);
      }
    }
    row.jump = row.jump_height > row.threshold;

    const auto peak = std::max_element(row.mean_sweeps.begin(), row.mean_sweeps.end());
    row.time_peak = *peak;
    row.time_peak_location = row.x[peak - row.mean_sweeps.begin()];
    if (row.jump) {
      const double grid_step = row.x.size() > 1 ? std::abs(row.x[1] - row.x[0]) : 0.0;
      row.locations_agree = std::abs(row.jump_location - row.time_peak_location) <= grid_step + 1e-12;
    }
    out.push_back(std::move(row));
  }
  return out;
}

PhaseDiagnosis diagnose(const std::vector<RunRecord>& records, const DiagnosisOptions& options) {
  PhaseDiagnosis d;
  bool has_planted = false, has_random = false;
  for (const auto& r : records) {
    has_planted |= r.init == InitKind::Planted;
    has_random |= r.init == InitKind::Random;
  }
  if (has_planted && has_random) {
    d.coexistence = dual_init_gap(records, options.gap_threshold, options.transition.measure);
    d.condensation = condensation_scan(records, options.gap_threshold, options.transition.measure);
  }
  bool has_scan_init = false;
  for (const auto& r : records) has_scan_init |= r.init == options.transition.init;
  if (has_scan_init) d.transitions = transition_scan(records, options.transition);
  return d;
}

}  // namespace sbm
