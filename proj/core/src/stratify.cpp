#include "ibprof/stratify.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ibprof/error.hpp"

namespace ibprof {

Partition Partition::from_labels(std::vector<BlockId> block_of) {
  Partition p;
  std::size_t k = 0;
  for (BlockId b : block_of) k = std::max<std::size_t>(k, std::size_t{b} + 1);
  std::vector<char> used(k, 0);
  for (BlockId b : block_of) used[b] = 1;
  for (std::size_t b = 0; b < k; ++b) {
    if (!used[b]) throw Error(ErrorCode::InvalidPartition, "block " + std::to_string(b) + " is empty");
  }
  p.block_of_ = std::move(block_of);
  p.k_ = k;
  return p;
}

Partition Partition::from_blocks(std::size_t n, const std::vector<std::vector<NodeId>>& blocks) {
  constexpr BlockId unset = ~BlockId{0};
  std::vector<BlockId> labels(n, unset);
  for (BlockId b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw Error(ErrorCode::InvalidPartition, "block " + std::to_string(b) + " is empty");
    for (NodeId v : blocks[b]) {
      if (v >= n) throw Error(ErrorCode::NodeIdOutOfRange, "node " + std::to_string(v) + " out of range");
      if (labels[v] != unset) throw Error(ErrorCode::InvalidPartition, "node " + std::to_string(v) + " in two blocks");
      labels[v] = b;
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (labels[v] == unset) throw Error(ErrorCode::InvalidPartition, "node " + std::to_string(v) + " unassigned");
  }
  return from_labels(std::move(labels));
}

Partition Partition::single_block(std::size_t n) {
  return from_labels(std::vector<BlockId>(n, 0));
}

std::vector<std::vector<NodeId>> Partition::members() const {
  std::vector<std::vector<NodeId>> out(k_);
  for (NodeId v = 0; v < block_of_.size(); ++v) out[block_of_[v]].push_back(v);
  return out;
}

Partition Partition::relabeled(std::span<const BlockId> perm) const {
  if (perm.size() != k_) throw Error(ErrorCode::InvalidArgument, "relabeled: permutation size mismatch");
  std::vector<char> hit(k_, 0);
  for (BlockId b : perm) {
    if (b >= k_ || hit[b]) throw Error(ErrorCode::InvalidArgument, "relabeled: not a permutation");
    hit[b] = 1;
  }
  std::vector<BlockId> labels(block_of_.size());
  for (std::size_t v = 0; v < labels.size(); ++v) labels[v] = perm[block_of_[v]];
  return from_labels(std::move(labels));
}

namespace {

void check_size(const Graph& g, const Partition& p) {
  if (p.node_count() != g.node_count()) {
    throw Error(ErrorCode::PartitionSizeMismatch, "partition covers " + std::to_string(p.node_count()) +
                                                      " nodes, graph has " + std::to_string(g.node_count()));
  }
}

constexpr std::array<Stratum, 4> kDirected{Stratum::II, Stratum::IB, Stratum::BI, Stratum::BB};
constexpr std::array<Stratum, 3> kUndirected{Stratum::II, Stratum::IB, Stratum::BB};
constexpr std::array<Stratum, 3> kDirectedIntra{Stratum::II, Stratum::IB, Stratum::BI};
constexpr std::array<Stratum, 2> kUndirectedIntra{Stratum::II, Stratum::IB};

Stratum label(bool directed, Role tail, Role head) {
  const bool ti = tail == Role::Interior, hi = head == Role::Interior;
  if (ti && hi) return Stratum::II;
  if (!ti && !hi) return Stratum::BB;
  if (!directed) return Stratum::IB;
  return ti ? Stratum::IB : Stratum::BI;
}

}  // namespace

NodeRoles classify_roles(const Graph& g, const Partition& p) {
  check_size(g, p);
  NodeRoles r;
  r.role_of.assign(g.node_count(), Role::Interior);
  for (const Arc& a : g.arcs()) {
    if (p.block_of(a.tail) != p.block_of(a.head)) {
      r.role_of[a.tail] = Role::Boundary;
      r.role_of[a.head] = Role::Boundary;
    }
  }
  return r;
}

std::string_view stratum_name(Stratum t, bool directed) noexcept {
  switch (t) {
    case Stratum::II:
      return directed ? "I->I" : "II";
    case Stratum::IB:
      return directed ? "I->B" : "IB";
    case Stratum::BI:
      return "B->I";
    case Stratum::BB:
      return directed ? "B->B" : "BB";
  }
  return "?";
}

std::span<const Stratum> strata_for(bool directed) noexcept {
  if (directed) return kDirected;
  return kUndirected;
}

std::span<const Stratum> intra_strata_for(bool directed) noexcept {
  if (directed) return kDirectedIntra;
  return kUndirectedIntra;
}

double Stratification::total_mass() const noexcept {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

Stratification stratify_arcs(const Graph& g, const Partition& p, const NodeRoles& roles) {
  check_size(g, p);
  if (roles.role_of.size() != g.node_count() || roles != classify_roles(g, p)) {
    throw Error(ErrorCode::RoleMismatch, "roles were not derived from this graph and partition");
  }
  const std::size_t n = g.node_count();
  Stratification s;
  s.directed = g.directed();
  s.unit_weights = g.unit_weights();
  s.partition = p;
  s.roles = roles;
  for (auto& v : s.type_out_strength) v.assign(n, 0.0);
  for (auto& v : s.type_in_strength) v.assign(n, 0.0);

  s.stratum_of.reserve(g.arcs().size());
  for (const Arc& a : g.arcs()) {
    Stratum t = label(s.directed, roles.role_of[a.tail], roles.role_of[a.head]);
    s.stratum_of.push_back(t);
    s.edge_mass[static_cast<std::size_t>(t)] += a.weight;
    ++s.edge_count[static_cast<std::size_t>(t)];
  }
  s.entries.reserve(g.adjacency_entries().size());
  for (const Arc& a : g.adjacency_entries()) {
    Stratum t = label(s.directed, roles.role_of[a.tail], roles.role_of[a.head]);
    const auto ti = static_cast<std::size_t>(t);
    s.entries.push_back({a.tail, a.head, a.weight, t});
    s.mass[ti] += a.weight;
    ++s.count[ti];
    s.type_out_strength[ti][a.tail] += a.weight;
    s.type_in_strength[ti][a.head] += a.weight;
  }
  return s;
}

RefinementMasses refinement_masses(const Graph& g, const Partition& p, const Partition& q) {
  check_size(g, q);
  Stratification s = stratify_arcs(g, p);
  RefinementMasses r;
  r.labels = q.block_count();
  for (auto& t : r.table) t.assign(r.labels * r.labels, 0.0);
  for (const auto& e : s.entries) {
    r.table[static_cast<std::size_t>(e.stratum)][q.block_of(e.tail) * r.labels + q.block_of(e.head)] += e.weight;
  }
  return r;
}

std::optional<double> participation(const Graph& g, const Partition& p, NodeId v, FlowDirection dir) {
  check_size(g, p);
  if (v >= g.node_count()) throw Error(ErrorCode::NodeIdOutOfRange, "participation: node out of range");
  std::vector<double> per_block(p.block_count(), 0.0);
  double total = 0.0;
  if (dir == FlowDirection::Out) {
    for (const Arc& a : g.out_entries(v)) {
      per_block[p.block_of(a.head)] += a.weight;
      total += a.weight;
    }
  } else {
    for (const Arc& a : g.in_entries(v)) {
      per_block[p.block_of(a.tail)] += a.weight;
      total += a.weight;
    }
  }
  if (total <= 0.0) return std::nullopt;
  double sum_sq = 0.0;
  for (double k : per_block) sum_sq += (k / total) * (k / total);
  return std::max(0.0, 1.0 - sum_sq);
}

}  // namespace ibprof
