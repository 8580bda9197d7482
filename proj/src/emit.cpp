#include "sbm/config.hpp"
#include "sbm/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace sbm {
namespace {

constexpr const char* kRecordHeader =
    "cell1,cell2,axis1,axis2,q,n,c,epsilon,delta,c_in,c_out,disassortative,trial,seed,init,steps,"
    "Q,Q_perm,Q_mu,baseline_Q,baseline_Qmu,sweeps,residual,converged,log_likelihood,error";

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Errors are free text; keep them on one CSV cell.
std::string clean(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, int line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(line, "bad number '" + s + "'");
}

template <typename Int>
Int to_int(const std::string& s, int line) {
  Int v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw ParseError(line, "bad integer '" + s + "'");
  return v;
}

void write_timings_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << "cell1,cell2,trial,init,steps,wall_seconds\n";
  for (const auto& r : records) {
    out << r.cell1 << ',' << r.cell2 << ',' << r.trial << ',' << to_string(r.init) << ',' << r.steps << ','
        << fmt(r.wall_seconds) << '\n';
  }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_records_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << kRecordHeader << '\n';
  for (const auto& r : records) {
    out << r.cell1 << ',' << r.cell2 << ',' << fmt(r.axis1) << ',' << fmt(r.axis2) << ',' << r.q << ','
        << r.n << ',' << fmt(r.c) << ',' << fmt(r.epsilon) << ',' << fmt(r.delta) << ',' << fmt(r.c_in)
        << ',' << fmt(r.c_out) << ',' << (r.disassortative ? 1 : 0) << ',' << r.trial << ',' << r.seed
        << ',' << to_string(r.init) << ',' << r.steps << ',' << fmt(r.overlap.q) << ','
        << fmt(r.overlap.q_perm) << ',' << fmt(r.overlap.q_mu) << ',' << fmt(r.overlap.baseline_q) << ','
        << fmt(r.overlap.baseline_qmu) << ',' << r.convergence.sweeps << ','
        << fmt(r.convergence.residual) << ',' << (r.convergence.converged ? 1 : 0) << ','
        << fmt(r.convergence.log_likelihood) << ',' << clean(r.error) << '\n';
  }
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordHeader) throw ParseError(1, "unexpected records header");
  std::vector<RunRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 26) throw ParseError(lineno, "expected 26 fields, got " + std::to_string(f.size()));
    RunRecord r;
    r.cell1 = to_int<int>(f[0], lineno);
    r.cell2 = to_int<int>(f[1], lineno);
    r.axis1 = to_double(f[2], lineno);
    r.axis2 = to_double(f[3], lineno);
    r.q = to_int<int>(f[4], lineno);
    r.n = to_int<int>(f[5], lineno);
    r.c = to_double(f[6], lineno);
    r.epsilon = to_double(f[7], lineno);
    r.delta = to_double(f[8], lineno);
    r.c_in = to_double(f[9], lineno);
    r.c_out = to_double(f[10], lineno);
    r.disassortative = f[11] == "1";
    r.trial = to_int<int>(f[12], lineno);
    r.seed = to_int<std::uint64_t>(f[13], lineno);
    try {
      r.init = parse_init_kind(f[14]);
    } catch (const InvalidParameter& e) {
      throw ParseError(lineno, e.what());
    }
    r.steps = to_int<int>(f[15], lineno);
    r.overlap = {to_double(f[16], lineno), to_double(f[18], lineno), to_double(f[17], lineno),
                 to_double(f[19], lineno), to_double(f[20], lineno)};
    r.convergence = {to_int<int>(f[21], lineno), to_double(f[22], lineno), f[23] == "1",
                     to_double(f[24], lineno)};
    r.error = f[25];
    out.push_back(std::move(r));
  }
  return out;
}

void write_trajectory_csv(const std::vector<TrajectoryPoint>& trajectory, std::ostream& out) {
  out << "step,value,branch,added,removed,Q,Q_perm,Q_mu,sweeps,residual,converged,log_likelihood,error\n";
  for (const auto& p : trajectory) {
    const RunRecord& r = p.record;
    out << p.step << ',' << fmt(p.value) << ',' << p.branch << ',' << p.edits.added << ','
        << p.edits.removed << ',' << fmt(r.overlap.q) << ',' << fmt(r.overlap.q_perm) << ','
        << fmt(r.overlap.q_mu) << ',' << r.convergence.sweeps << ',' << fmt(r.convergence.residual) << ','
        << (r.convergence.converged ? 1 : 0) << ',' << fmt(r.convergence.log_likelihood) << ','
        << clean(r.error) << '\n';
  }
}

void emit(const std::vector<RunRecord>& records, const PhaseDiagnosis& diagnosis, const SweepSpec& spec,
          const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  {
    auto out = open_for_write(dir / "records.csv");
    write_records_csv(records, out);
  }
  {
    auto out = open_for_write(dir / "timings.csv");
    write_timings_csv(records, out);
  }
  open_for_write(dir / "diagnosis.json") << to_json(diagnosis) << '\n';
  open_for_write(dir / "sweep_spec.json") << to_json(spec) << '\n';
}

}  // namespace sbm
