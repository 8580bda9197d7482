#pragma once

#include "sbm/graph_model.hpp"

#include <filesystem>
#include <iosfwd>

namespace sbm {

// Plain-text network format:
//
//   n q
//   s_1 s_2 ... s_n          (planted labels, 1-based)
//   m
//   i j                      (m lines, 0-based, i < j)
//   # key=value              (trailing comments carrying the generating spec)
//
// Spec keys are n, q, gamma (comma separated) and c (rows separated by ';').

void write_network(const Network& net, std::ostream& out);
void write_network(const Network& net, const std::filesystem::path& path);

/// Throws ParseError with the offending line number on malformed input.
Network parse_network(std::istream& in);
Network parse_network(const std::filesystem::path& path);

}  // namespace sbm
