#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sbm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when model or run parameters violate a precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the network reader; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A message or marginal normalizer vanished. `dst` is -1 for a marginal.
class DegenerateMessage : public std::runtime_error {
 public:
  DegenerateMessage(int src, int dst)
      : std::runtime_error(dst < 0 ? "degenerate marginal at node " + std::to_string(src)
                                   : "degenerate message " + std::to_string(src) + "->" +
                                         std::to_string(dst)),
        src_(src),
        dst_(dst) {}
  int src() const { return src_; }
  int dst() const { return dst_; }

 private:
  int src_;
  int dst_;
};

/// splitmix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  return splitmix64(base ^ splitmix64(salt));
}

}  // namespace sbm
