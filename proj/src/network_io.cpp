#include "sbm/network_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace sbm {

void write_network(const Network& net, std::ostream& out) {
  if (!net.has_labels()) throw InvalidParameter("network file format requires planted labels");
  const int q = net.q();
  out << net.n() << ' ' << q << '\n';
  for (int i = 0; i < net.n(); ++i) out << (i ? " " : "") << net.planted()[i] + 1;
  out << '\n' << net.m() << '\n';
  for (const auto& [u, v] : net.edges()) out << u << ' ' << v << '\n';

  std::ostringstream num;
  num.precision(17);
  const auto& spec = net.spec();
  out << "# n=" << spec.n << '\n' << "# q=" << q << '\n' << "# gamma=";
  for (int a = 0; a < q; ++a) {
    num.str("");
    num << spec.prior[a];
    out << (a ? "," : "") << num.str();
  }
  out << '\n' << "# c=";
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      num.str("");
      num << spec.affinity(a, b);
      out << (b ? "," : (a ? ";" : "")) << num.str();
    }
  }
  out << '\n';
}

void write_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_network(net, out);
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  std::string require(const char* what) {
    std::string line;
    if (!next(line)) throw ParseError(line_no_ + 1, std::string("missing ") + what);
    return line;
  }
  int line() const { return line_no_; }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

template <typename T>
std::vector<T> parse_numbers(const std::string& text, char sep, int line) {
  std::vector<T> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == sep || text[pos] == '\t')) ++pos;
    if (pos >= text.size()) break;
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc()) throw ParseError(line, "expected a number near '" + text.substr(pos) + "'");
    pos = static_cast<std::size_t>(ptr - text.data());
    if (pos < text.size() && text[pos] != ' ' && text[pos] != sep && text[pos] != '\t') {
      throw ParseError(line, "unexpected character '" + std::string(1, text[pos]) + "'");
    }
    out.push_back(value);
  }
  return out;
}

}  // namespace

Network parse_network(std::istream& in) {
  LineReader reader(in);
  const std::string header_line = reader.require("header");
  const auto header = parse_numbers<long long>(header_line, ' ', reader.line());
  if (header.size() != 2 || header[0] < 1 || header[1] < 1) {
    throw ParseError(reader.line(), "header must be 'n q' with positive values");
  }
  const int n = static_cast<int>(header[0]);
  const int q = static_cast<int>(header[1]);

  const std::string raw_labels_line = reader.require("labels");
  const auto raw_labels = parse_numbers<int>(raw_labels_line, ' ', reader.line());
  if (static_cast<int>(raw_labels.size()) != n) {
    throw ParseError(reader.line(), "expected " + std::to_string(n) + " labels");
  }
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    if (raw_labels[i] < 1 || raw_labels[i] > q) throw ParseError(reader.line(), "label out of range");
    labels[i] = raw_labels[i] - 1;
  }

  const std::string count_line = reader.require("edge count");
  const auto count = parse_numbers<long long>(count_line, ' ', reader.line());
  if (count.size() != 1 || count[0] < 0) throw ParseError(reader.line(), "bad edge count");

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(count[0]));
  std::map<Edge, int> seen;
  for (long long k = 0; k < count[0]; ++k) {
    const std::string pair_line = reader.require("edge");
    const auto pair = parse_numbers<long long>(pair_line, ' ', reader.line());
    if (pair.size() != 2) throw ParseError(reader.line(), "edge line must hold two node ids");
    if (pair[0] < 0 || pair[1] < 0 || pair[0] >= n || pair[1] >= n) {
      throw ParseError(reader.line(), "node id out of range");
    }
    if (pair[0] >= pair[1]) throw ParseError(reader.line(), "edge must satisfy i < j");
    const Edge e{static_cast<int>(pair[0]), static_cast<int>(pair[1])};
    if (!seen.emplace(e, reader.line()).second) {
      throw ParseError(reader.line(), "duplicate edge (first seen on line " +
                                          std::to_string(seen[e]) + ")");
    }
    edges.push_back(e);
  }

  std::map<std::string, std::pair<std::string, int>> keys;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    if (line[0] != '#') throw ParseError(reader.line(), "trailing lines must be comments");
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto key = line.substr(1, eq - 1);
    key.erase(0, key.find_first_not_of(' '));
    key.erase(key.find_last_not_of(' ') + 1);
    keys[key] = {line.substr(eq + 1), reader.line()};
  }
  for (const char* required : {"gamma", "c"}) {
    if (!keys.count(required)) {
      throw ParseError(reader.line(), std::string("missing spec key '") + required + "'");
    }
  }
  for (const char* dim : {"n", "q"}) {
    if (!keys.count(dim)) continue;
    const auto& [text, at] = keys[dim];
    const auto v = parse_numbers<long long>(text, ' ', at);
    if (v.size() != 1 || v[0] != (dim[0] == 'n' ? n : q)) {
      throw ParseError(at, std::string("spec key '") + dim + "' disagrees with the header");
    }
  }

  const auto& [gamma_text, gamma_line] = keys["gamma"];
  const auto gamma = parse_numbers<double>(gamma_text, ',', gamma_line);
  if (static_cast<int>(gamma.size()) != q) throw ParseError(gamma_line, "gamma must have q entries");
  const auto& [c_text, c_line] = keys["c"];
  Matrix c(q, q);
  std::istringstream rows(c_text);
  std::string row;
  int a = 0;
  while (std::getline(rows, row, ';')) {
    const auto values = parse_numbers<double>(row, ',', c_line);
    if (a >= q || static_cast<int>(values.size()) != q) throw ParseError(c_line, "c must be q x q");
    for (int b = 0; b < q; ++b) c(a, b) = values[b];
    ++a;
  }
  if (a != q) throw ParseError(c_line, "c must be q x q");

  try {
    BlockModelSpec spec(n, GroupPrior(Eigen::Map<const Vector>(gamma.data(), q)),
                        AffinityMatrix(std::move(c)));
    return Network(std::move(spec), std::move(labels), std::move(edges));
  } catch (const InvalidParameter& e) {
    throw ParseError(reader.line(), e.what());
  }
}

Network parse_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_network(in);
}

}  // namespace sbm
