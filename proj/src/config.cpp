#include "sbm/config.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sbm {
namespace {

using nlohmann::json;

void read_family(const json& j, SymmetricFamily& f) {
  f.q = j.value("q", f.q);
  f.c = j.value("c", f.c);
  f.epsilon = j.value("epsilon", f.epsilon);
  f.delta = j.value("delta", f.delta);
  f.disassortative = j.value("disassortative", f.disassortative);
  if (j.contains("zeta") && !j["zeta"].is_null()) f.zeta = j["zeta"].get<std::vector<double>>();
}

Axis read_axis(const json& j) {
  Axis a;
  a.name = j.at("name").get<std::string>();
  a.start = j.at("start").get<double>();
  a.stop = j.value("stop", a.start);
  a.step = j.value("step", 1.0);
  return a;
}

json axis_json(const Axis& a) {
  return {{"name", a.name}, {"start", a.start}, {"stop", a.stop}, {"step", a.step}};
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("config: ") + e.what());
  }
}

// NaN and infinities are not valid JSON numbers.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

GenerateConfig parse_generate_config(const std::string& json_text) {
  const json j = parse(json_text);
  GenerateConfig cfg;
  try {
    cfg.n = j.value("n", cfg.n);
    read_family(j, cfg.family);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.value("exact_sizes", false)) cfg.labels = LabelMode::ExactSizes;
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("config: ") + e.what());
  }
  return cfg;
}

SweepSpec parse_sweep_spec(const std::string& json_text) {
  const json j = parse(json_text);
  SweepSpec s;
  try {
    read_family(j, s.family);
    s.axis1 = read_axis(j.at("axis1"));
    if (j.contains("axis2") && !j["axis2"].is_null()) s.axis2 = read_axis(j["axis2"]);
    s.n = j.value("n", s.n);
    s.trials = j.value("trials", s.trials);
    if (j.contains("inits")) {
      s.inits.clear();
      for (const auto& name : j["inits"]) s.inits.push_back(parse_init_kind(name.get<std::string>()));
    }
    s.finite_steps = j.value("finite_steps", s.finite_steps);
    s.tol = j.value("tol", s.tol);
    s.max_sweeps = j.value("max_sweeps", s.max_sweeps);
    s.seed = j.value("seed", s.seed);
    s.threads = j.value("threads", s.threads);
    if (j.value("exact_sizes", false)) s.labels = LabelMode::ExactSizes;
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("sweep config: ") + e.what());
  }
  return s;
}

std::string to_json(const SweepSpec& s) {
  json j;
  j["q"] = s.family.q;
  j["c"] = s.family.c;
  j["epsilon"] = s.family.epsilon;
  j["delta"] = s.family.delta;
  if (!s.family.zeta.empty()) j["zeta"] = s.family.zeta;
  j["disassortative"] = s.family.disassortative;
  j["axis1"] = axis_json(s.axis1);
  if (s.axis2) j["axis2"] = axis_json(*s.axis2);
  j["n"] = s.n;
  j["trials"] = s.trials;
  j["inits"] = json::array();
  for (auto k : s.inits) j["inits"].push_back(std::string(to_string(k)));
  j["finite_steps"] = s.finite_steps;
  j["tol"] = s.tol;
  j["max_sweeps"] = s.max_sweeps;
  j["seed"] = s.seed;
  j["exact_sizes"] = s.labels == LabelMode::ExactSizes;
  j["threads"] = s.threads;
  return j.dump(2);
}

std::string to_json(const PhaseDiagnosis& d) {
  json j;
  j["coexistence"] = json::array();
  for (const auto& row : d.coexistence) {
    json r{{"row", row.row}, {"y", row.y}, {"cells", json::array()}};
    for (const auto& c : row.cells) {
      r["cells"].push_back({{"cell1", c.cell1},
                            {"x", c.x},
                            {"gap", number(c.gap)},
                            {"delta_log_likelihood", number(c.delta_ll)},
                            {"flagged", c.flagged}});
    }
    j["coexistence"].push_back(r);
  }
  j["condensation"] = json::array();
  for (const auto& row : d.condensation) {
    j["condensation"].push_back(
        {{"row", row.row}, {"y", row.y}, {"crossing", row.crossing ? json(*row.crossing) : json(nullptr)}});
  }
  j["transitions"] = json::array();
  for (const auto& row : d.transitions) {
    j["transitions"].push_back({{"row", row.row},
                                {"y", row.y},
                                {"jump", row.jump},
                                {"jump_height", number(row.jump_height)},
                                {"jump_location", number(row.jump_location)},
                                {"raw_jump", number(row.raw_jump)},
                                {"noise", number(row.noise)},
                                {"threshold", number(row.threshold)},
                                {"time_peak_location", number(row.time_peak_location)},
                                {"time_peak", number(row.time_peak)},
                                {"locations_agree", row.locations_agree}});
  }
  return j.dump(2);
}

std::string to_json(const ConvergenceReport& r) {
  json j{{"sweeps", r.sweeps},
         {"residual", number(r.residual)},
         {"converged", r.converged},
         {"log_likelihood", number(r.log_likelihood)}};
  return j.dump(2);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sbm
