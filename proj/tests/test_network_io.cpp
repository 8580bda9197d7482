#include "doctest.h"
#include "support.hpp"

#include "sbm/network_io.hpp"

#include <sstream>
#include <string>

using namespace sbm;

namespace {

std::string to_text(const Network& net) {
  std::ostringstream out;
  write_network(net, out);
  return out.str();
}

Network from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_network(in);
}

int error_line(const std::string& text) {
  try {
    from_text(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

const char* kSpecTail = "# n=3\n# q=2\n# gamma=0.5,0.5\n# c=4,2;2,4\n";

}  // namespace

TEST_SUITE("network_io") {

TEST_CASE("round trip of sampled networks") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SymmetricFamily f{3, 4.0, 2.5, 0.3, {}, false};
    const Network net = sample_network(f.spec(300), seed);
    const Network back = from_text(to_text(net));
    CHECK(back == net);
    CHECK(back.spec().prior.gamma() == net.spec().prior.gamma());
    CHECK(back.spec().affinity.matrix() == net.spec().affinity.matrix());
  }
}

TEST_CASE("round trip keeps irrational parameters exactly") {
  const SymmetricFamily f{5, 13.7, 0.0, 0.05, {}, true};
  const Network net = sample_network(f.spec(200), 9);
  CHECK(from_text(to_text(net)) == net);
}

TEST_CASE("empty graph") {
  const BlockModelSpec spec(3, group_sizes(2, 0.0), AffinityMatrix(Matrix::Ones(2, 2)));
  const Network net(spec, {0, 1, 0}, {});
  const std::string text = to_text(net);
  CHECK(text.rfind("3 2\n1 2 1\n0\n#", 0) == 0);
  CHECK(from_text(text) == net);
}

TEST_CASE("format layout") {
  const BlockModelSpec spec(3, group_sizes(2, 0.0), AffinityMatrix((Matrix(2, 2) << 4, 2, 2, 4).finished()));
  const Network net(spec, {0, 1, 1}, {{2, 0}, {1, 2}});
  CHECK(to_text(net) == std::string("3 2\n1 2 2\n2\n0 2\n1 2\n") + kSpecTail);
}

TEST_CASE("malformed files report the line") {
  const std::string good = std::string("3 2\n1 2 1\n2\n0 1\n1 2\n") + kSpecTail;
  CHECK_NOTHROW(from_text(good));

  CHECK(error_line(std::string("3 2\n1 2 1\n2\n0 1\n0 1\n") + kSpecTail) == 5);
  CHECK(error_line(std::string("3 2\n1 2 1\n1\n1 0\n") + kSpecTail) == 4);
  CHECK(error_line(std::string("3 2\n1 2 1\n1\n0 3\n") + kSpecTail) == 4);
  CHECK(error_line(std::string("3 2\n1 2 1\n1\n1 1\n") + kSpecTail) == 4);
  CHECK(error_line(std::string("3 2\n1 3 1\n0\n") + kSpecTail) == 2);
  CHECK(error_line(std::string("3 2\n1 2\n0\n") + kSpecTail) == 2);
  CHECK(error_line(std::string("3 x\n")) == 1);
  CHECK(error_line(std::string("3 2\n1 2 1\n2\n0 1\n")) == 5);
  CHECK(error_line("3 2\n1 2 1\n0\n# gamma=0.5,0.5\n") > 0);
  CHECK(error_line("3 2\n1 2 1\n0\n# n=4\n# gamma=0.5,0.5\n# c=1,1;1,1\n") == 4);
  CHECK(error_line("3 2\n1 2 1\n0\n# gamma=0.5,0.5\n# c=1,2;3,1\n") > 0);
  CHECK(error_line("3 2\n1 2 1\n0\nextra\n") == 4);
}

TEST_CASE("missing file") {
  CHECK_THROWS(parse_network(std::filesystem::path("/nonexistent/network.txt")));
}

}  // TEST_SUITE
