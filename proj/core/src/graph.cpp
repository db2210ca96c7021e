#include "ibprof/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "ibprof/error.hpp"

namespace ibprof {

namespace {

bool by_tail_head(const Arc& a, const Arc& b) {
  return a.tail != b.tail ? a.tail < b.tail : a.head < b.head;
}

bool by_head_tail(const Arc& a, const Arc& b) {
  return a.head != b.head ? a.head < b.head : a.tail < b.tail;
}

std::vector<std::size_t> offsets_of(std::size_t n, const std::vector<Arc>& sorted, bool by_tail) {
  std::vector<std::size_t> off(n + 1, 0);
  for (const Arc& a : sorted) ++off[(by_tail ? a.tail : a.head) + 1];
  for (std::size_t i = 0; i < n; ++i) off[i + 1] += off[i];
  return off;
}

}  // namespace

Graph Graph::build(std::size_t n, std::span<const Arc> edges, Directedness directedness) {
  Graph g;
  g.n_ = n;
  g.directed_ = directedness == Directedness::Directed;

  std::vector<Arc> arcs;
  arcs.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    Arc a = edges[i];
    if (a.tail >= n || a.head >= n) {
      throw Error(ErrorCode::NodeIdOutOfRange,
                  "edge " + std::to_string(i) + ": node id out of range for n=" + std::to_string(n));
    }
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw Error(ErrorCode::NegativeWeight, "edge " + std::to_string(i) + ": weight must be finite and >= 0");
    }
    if (!g.directed_ && a.tail > a.head) std::swap(a.tail, a.head);
    arcs.push_back(a);
  }
  std::stable_sort(arcs.begin(), arcs.end(), by_tail_head);

  for (const Arc& a : arcs) {
    if (!g.arcs_.empty() && g.arcs_.back().tail == a.tail && g.arcs_.back().head == a.head) {
      g.arcs_.back().weight += a.weight;
    } else {
      g.arcs_.push_back(a);
    }
  }
  std::erase_if(g.arcs_, [](const Arc& a) { return a.weight == 0.0; });
  g.unit_weights_ = std::all_of(g.arcs_.begin(), g.arcs_.end(), [](const Arc& a) { return a.weight == 1.0; });

  if (g.directed_) {
    g.out_entries_ = g.arcs_;
  } else {
    g.out_entries_.reserve(2 * g.arcs_.size());
    for (const Arc& a : g.arcs_) {
      g.out_entries_.push_back(a);
      g.out_entries_.push_back({a.head, a.tail, a.weight});
    }
    std::stable_sort(g.out_entries_.begin(), g.out_entries_.end(), by_tail_head);
  }
  g.in_entries_ = g.out_entries_;
  std::stable_sort(g.in_entries_.begin(), g.in_entries_.end(), by_head_tail);
  g.out_offsets_ = offsets_of(n, g.out_entries_, true);
  g.in_offsets_ = offsets_of(n, g.in_entries_, false);
  return g;
}

StrengthVectors Graph::strengths() const {
  StrengthVectors s;
  s.out_strength.assign(n_, 0.0);
  s.in_strength.assign(n_, 0.0);
  double total = 0.0;
  for (const Arc& a : out_entries_) {
    s.out_strength[a.tail] += a.weight;
    s.in_strength[a.head] += a.weight;
    total += a.weight;
  }
  s.total_mass = directed_ ? total : 0.5 * total;
  return s;
}

Graph Graph::as_directed() const {
  if (directed_) return *this;
  return build(n_, out_entries_, Directedness::Directed);
}

std::vector<std::uint32_t> strongly_connected_components(const Graph& g) {
  // Kosaraju with explicit stacks.
  const std::size_t n = g.node_count();
  std::vector<char> seen(n, 0);
  std::vector<NodeId> order;
  order.reserve(n);
  std::vector<std::pair<NodeId, std::size_t>> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (seen[s]) continue;
    seen[s] = 1;
    stack.emplace_back(s, 0);
    while (!stack.empty()) {
      auto& [v, pos] = stack.back();
      auto out = g.out_entries(v);
      if (pos < out.size()) {
        NodeId w = out[pos++].head;
        if (!seen[w]) {
          seen[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }

  constexpr std::uint32_t unset = ~std::uint32_t{0};
  std::vector<std::uint32_t> comp(n, unset);
  std::uint32_t next = 0;
  std::vector<NodeId> todo;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] != unset) continue;
    comp[*it] = next;
    todo.push_back(*it);
    while (!todo.empty()) {
      NodeId v = todo.back();
      todo.pop_back();
      for (const Arc& a : g.in_entries(v)) {
        if (comp[a.tail] == unset) {
          comp[a.tail] = next;
          todo.push_back(a.tail);
        }
      }
    }
    ++next;
  }
  return comp;
}

bool is_strongly_connected(const Graph& g) {
  if (g.node_count() <= 1) return true;
  auto comp = strongly_connected_components(g);
  return std::all_of(comp.begin(), comp.end(), [](std::uint32_t c) { return c == 0; });
}

namespace {

struct ComponentPower {
  std::vector<double> x;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Shifted power iteration of (M + cI) restricted to `nodes`, where M = A or
// A^T. Returns the Collatz-Wielandt bracket of M.
ComponentPower power_on_component(const Graph& g, const std::vector<NodeId>& nodes,
                                  const std::vector<std::uint32_t>& comp, std::uint32_t id, bool transpose,
                                  double tol, std::size_t max_iterations) {
  const std::size_t k = nodes.size();
  std::vector<std::size_t> local(g.node_count(), 0);
  for (std::size_t i = 0; i < k; ++i) local[nodes[i]] = i;

  auto row = [&](NodeId v) { return transpose ? g.in_entries(v) : g.out_entries(v); };
  auto other = [&](const Arc& a) { return transpose ? a.tail : a.head; };

  double min_sum = INFINITY, max_sum = 0.0;
  for (NodeId v : nodes) {
    double s = 0.0;
    for (const Arc& a : row(v))
      if (comp[other(a)] == id) s += a.weight;
    min_sum = std::min(min_sum, s);
    max_sum = std::max(max_sum, s);
  }
  const double c = 0.5 * (min_sum + max_sum);

  ComponentPower r;
  r.x.assign(k, 1.0);
  std::vector<double> y(k);
  while (r.iterations < max_iterations) {
    ++r.iterations;
    double lo = INFINITY, hi = -INFINITY, ymax = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double s = c * r.x[i];
      for (const Arc& a : row(nodes[i])) {
        NodeId w = other(a);
        if (comp[w] == id) s += a.weight * r.x[local[w]];
      }
      y[i] = s;
      double ratio = s / r.x[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      ymax = std::max(ymax, s);
    }
    r.lower = std::max(0.0, lo - c);
    r.upper = hi - c;
    for (std::size_t i = 0; i < k; ++i) r.x[i] = y[i] / ymax;
    if (r.upper - r.lower <= tol * std::max(1.0, r.upper)) {
      r.converged = true;
      break;
    }
  }
  return r;
}

std::vector<std::vector<NodeId>> group_components(const std::vector<std::uint32_t>& comp) {
  std::uint32_t count = 0;
  for (auto c : comp) count = std::max(count, c + 1);
  std::vector<std::vector<NodeId>> groups(count);
  for (NodeId v = 0; v < comp.size(); ++v) groups[comp[v]].push_back(v);
  return groups;
}

}  // namespace

RadiusEstimate spectral_radius(const Graph& g, double tol, std::size_t max_iterations) {
  if (g.arcs().empty()) throw Error(ErrorCode::EmptyGraph, "spectral_radius: graph has no arcs");
  auto comp = strongly_connected_components(g);
  auto groups = group_components(comp);

  RadiusEstimate est;
  est.strongly_connected = groups.size() == 1;
  for (std::uint32_t id = 0; id < groups.size(); ++id) {
    const auto& nodes = groups[id];
    bool has_internal = false;
    for (NodeId v : nodes) {
      for (const Arc& a : g.out_entries(v)) has_internal |= comp[a.head] == id;
    }
    if (!has_internal) continue;
    auto r = power_on_component(g, nodes, comp, id, false, tol, max_iterations);
    est.iterations += r.iterations;
    if (!r.converged) {
      throw Error(ErrorCode::NonConvergence,
                  "spectral_radius: no convergence after " + std::to_string(max_iterations) + " iterations");
    }
    est.lower = std::max(est.lower, r.lower);
    est.upper = std::max(est.upper, r.upper);
  }
  est.value = 0.5 * (est.lower + est.upper);
  return est;
}

std::vector<double> perron_vector(const Graph& g, bool transpose, double tol, std::size_t max_iterations) {
  if (g.arcs().empty()) throw Error(ErrorCode::EmptyGraph, "perron_vector: graph has no arcs");
  if (!is_strongly_connected(g)) throw Error(ErrorCode::InvalidArgument, "perron_vector: graph not strongly connected");
  std::vector<std::uint32_t> comp(g.node_count(), 0);
  std::vector<NodeId> nodes(g.node_count());
  for (NodeId v = 0; v < nodes.size(); ++v) nodes[v] = v;
  auto r = power_on_component(g, nodes, comp, 0, transpose, tol, max_iterations);
  if (!r.converged) throw Error(ErrorCode::NonConvergence, "perron_vector: no convergence");
  double norm = 0.0;
  for (double v : r.x) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : r.x) v /= norm;
  return r.x;
}

Graph undirected_projection(const Graph& g) {
  std::vector<Arc> edges;
  edges.reserve(g.arcs().size());
  for (const Arc& a : g.arcs()) {
    if (a.tail != a.head) edges.push_back(a);
  }
  // Directed arcs u->v and v->u both land on {min,max} and merge by summation.
  return Graph::build(g.node_count(), edges, Directedness::Undirected);
}

}  // namespace ibprof
