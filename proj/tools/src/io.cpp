#include "ibprof/cli/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "ibprof/error.hpp"

namespace ibprof::cli {

namespace {

[[noreturn]] void fail(ErrorCode code, std::size_t line, const std::string& what) {
  throw Error(code, fmt::format("line {}: {}", line, what));
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == '\t' || s[i] == ' ')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != '\t' && s[j] != ' ') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class F>
void for_each_line(std::string_view text, F&& fn) {
  std::size_t line = 0, pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line;
    auto s = trim(text.substr(pos, end - pos));
    if (!s.empty() && s.front() != '#') fn(line, s);
    pos = end + 1;
  }
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(std::string_view s) {
  // strtod accepts forms from_chars in libstdc++ 11 does not (e.g. "inf").
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) return std::nullopt;
  return v;
}

NodeId node_field(std::string_view s, std::size_t line, std::size_t n_limit) {
  auto v = parse_uint(s);
  if (!v) fail(ErrorCode::ParseError, line, fmt::format("'{}' is not a nonnegative integer node id", s));
  if (*v >= n_limit) fail(ErrorCode::NodeIdOutOfRange, line, fmt::format("node id {} out of range", *v));
  return static_cast<NodeId>(*v);
}

struct KeyedLines {
  std::vector<std::pair<NodeId, std::string>> rows;  // in file order
  std::optional<std::string> default_value;
};

KeyedLines keyed_lines(std::string_view text, std::size_t n, bool allow_default) {
  KeyedLines out;
  std::vector<std::size_t> seen(n, 0);
  for_each_line(text, [&](std::size_t line, std::string_view s) {
    if (s.front() == '%') {
      if (allow_default && s.starts_with("%default=")) {
        out.default_value = std::string(trim(s.substr(9)));
        return;
      }
      fail(ErrorCode::ParseError, line, fmt::format("unknown directive '{}'", s));
    }
    auto f = fields(s);
    if (f.size() != 2) fail(ErrorCode::ParseError, line, "expected 'node<TAB>value'");
    const NodeId v = node_field(f[0], line, n);
    if (seen[v]) {
      fail(ErrorCode::DuplicateNode, line, fmt::format("node {} already listed on line {}", v, seen[v]));
    }
    seen[v] = line;
    out.rows.emplace_back(v, std::string(f[1]));
  });
  if (!out.default_value) {
    for (NodeId v = 0; v < n; ++v)
      if (!seen[v]) throw Error(ErrorCode::MissingNode, fmt::format("node {} missing", v));
  }
  return out;
}

struct LabelTable {
  std::vector<BlockId> labels;
  std::vector<std::string> names;
};

LabelTable map_labels(const KeyedLines& k, std::size_t n) {
  LabelTable t;
  std::map<std::string, BlockId> ids;
  auto id_of = [&](const std::string& name) {
    auto [it, inserted] = ids.try_emplace(name, static_cast<BlockId>(t.names.size()));
    if (inserted) t.names.push_back(name);
    return it->second;
  };
  t.labels.assign(n, 0);
  std::vector<char> set(n, 0);
  for (const auto& [v, name] : k.rows) {
    t.labels[v] = id_of(name);
    set[v] = 1;
  }
  if (k.default_value) {
    for (NodeId v = 0; v < n; ++v)
      if (!set[v]) t.labels[v] = id_of(*k.default_value);
  }
  return t;
}

}  // namespace

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::InvalidArgument, "write failed: " + path);
}

Graph parse_edge_list_text(std::string_view text) {
  Directedness dir = Directedness::Directed;
  std::optional<std::size_t> declared_n;
  bool seen_edge = false;
  std::vector<Arc> arcs;
  std::uint64_t max_id = 0;
  for_each_line(text, [&](std::size_t line, std::string_view s) {
    if (s.front() == '%') {
      if (seen_edge) fail(ErrorCode::ParseError, line, "directives must precede edges");
      if (s == "%directed") {
        dir = Directedness::Directed;
      } else if (s == "%undirected") {
        dir = Directedness::Undirected;
      } else if (s.starts_with("%n=")) {
        auto v = parse_uint(trim(s.substr(3)));
        if (!v) fail(ErrorCode::ParseError, line, "bad %n directive");
        declared_n = *v;
      } else {
        fail(ErrorCode::ParseError, line, fmt::format("unknown directive '{}'", s));
      }
      return;
    }
    seen_edge = true;
    auto f = fields(s);
    if (f.size() < 2 || f.size() > 3) fail(ErrorCode::ParseError, line, "expected 'tail<TAB>head[<TAB>weight]'");
    const std::size_t limit = declared_n.value_or(std::size_t{1} << 32);
    const NodeId t = node_field(f[0], line, limit), h = node_field(f[1], line, limit);
    double w = 1.0;
    if (f.size() == 3) {
      auto v = parse_real(f[2]);
      if (!v || !std::isfinite(*v)) fail(ErrorCode::ParseError, line, fmt::format("bad weight '{}'", f[2]));
      if (*v < 0.0) fail(ErrorCode::NegativeWeight, line, fmt::format("negative weight {}", f[2]));
      w = *v;
    }
    max_id = std::max<std::uint64_t>({max_id, t, h});
    arcs.push_back({t, h, w});
  });
  const std::size_t n = declared_n.value_or(arcs.empty() ? 0 : static_cast<std::size_t>(max_id) + 1);
  return Graph::build(n, arcs, dir);
}

Graph parse_edge_list(const std::string& path) { return parse_edge_list_text(read_file(path)); }

LabeledPartition parse_partition_text(std::string_view text, std::size_t n) {
  auto t = map_labels(keyed_lines(text, n, false), n);
  return {Partition::from_labels(std::move(t.labels)), std::move(t.names)};
}

LabeledPartition parse_partition(const std::string& path, std::size_t n) {
  return parse_partition_text(read_file(path), n);
}

std::vector<double> parse_scalar_attribute_text(std::string_view text, std::size_t n) {
  auto k = keyed_lines(text, n, true);
  std::vector<double> x(n, 0.0);
  if (k.default_value) {
    auto v = parse_real(*k.default_value);
    if (!v || !std::isfinite(*v)) throw Error(ErrorCode::ParseError, "bad %default value");
    std::fill(x.begin(), x.end(), *v);
  }
  for (const auto& [node, value] : k.rows) {
    auto v = parse_real(value);
    if (!v || !std::isfinite(*v)) throw Error(ErrorCode::ParseError, fmt::format("node {}: bad value '{}'", node, value));
    x[node] = *v;
  }
  return x;
}

std::vector<double> parse_scalar_attribute(const std::string& path, std::size_t n) {
  return parse_scalar_attribute_text(read_file(path), n);
}

CategoricalAttribute parse_categorical_attribute_text(std::string_view text, std::size_t n) {
  auto t = map_labels(keyed_lines(text, n, true), n);
  return {std::move(t.labels), std::move(t.names)};
}

CategoricalAttribute parse_categorical_attribute(const std::string& path, std::size_t n) {
  return parse_categorical_attribute_text(read_file(path), n);
}

std::string write_edge_list(const Graph& g) {
  std::string out = g.directed() ? "%directed\n" : "%undirected\n";
  out += fmt::format("%n={}\n", g.node_count());
  for (const Arc& a : g.arcs()) out += fmt::format("{}\t{}\t{}\n", a.tail, a.head, format_real(a.weight));
  return out;
}

std::string write_partition(const Partition& p) {
  std::string out;
  for (NodeId v = 0; v < p.node_count(); ++v) out += fmt::format("{}\t{}\n", v, p.block_of(v));
  return out;
}

std::string write_attribute(std::span<const double> x) {
  std::string out;
  for (std::size_t v = 0; v < x.size(); ++v) out += fmt::format("{}\t{}\n", v, format_real(x[v]));
  return out;
}

}  // namespace ibprof::cli
