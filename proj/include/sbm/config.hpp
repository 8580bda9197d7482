#pragma once

#include "sbm/bp.hpp"
#include "sbm/experiment.hpp"
#include "sbm/graph_model.hpp"

#include <cstdint>
#include <string>

namespace sbm {

/// Network-generation settings. JSON keys: n, q, c, epsilon, delta,
/// zeta (optional list), disassortative, seed, exact_sizes.
struct GenerateConfig {
  int n = 10000;
  SymmetricFamily family;
  std::uint64_t seed = 1;
  LabelMode labels = LabelMode::Multinomial;
};

GenerateConfig parse_generate_config(const std::string& json_text);

/// Sweep settings: the generation keys plus axis1, axis2 ({name, start,
/// stop, step}), trials, inits, finite_steps, tol, max_sweeps, threads.
SweepSpec parse_sweep_spec(const std::string& json_text);

std::string to_json(const SweepSpec& spec);
std::string to_json(const PhaseDiagnosis& diagnosis);
std::string to_json(const ConvergenceReport& report);

std::string read_text_file(const std::string& path);

}  // namespace sbm
