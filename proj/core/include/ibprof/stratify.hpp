#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ibprof/graph.hpp"

namespace ibprof {

using BlockId = std::uint32_t;

// Hard partition of 0..n-1 into K nonempty blocks with contiguous ids.
class Partition {
 public:
  Partition() = default;

  // Throws InvalidPartition when a block id in 0..K-1 is unused.
  static Partition from_labels(std::vector<BlockId> block_of);
  // Blocks given as node lists; every node 0..n-1 must appear exactly once.
  static Partition from_blocks(std::size_t n, const std::vector<std::vector<NodeId>>& blocks);
  static Partition single_block(std::size_t n);

  std::size_t node_count() const noexcept { return block_of_.size(); }
  std::size_t block_count() const noexcept { return k_; }
  BlockId block_of(NodeId v) const { return block_of_[v]; }
  std::span<const BlockId> labels() const noexcept { return block_of_; }
  std::vector<std::vector<NodeId>> members() const;

  // Block b becomes perm[b]; perm must be a permutation of 0..K-1.
  Partition relabeled(std::span<const BlockId> perm) const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<BlockId> block_of_;
  std::size_t k_ = 0;
};

enum class Role : std::uint8_t { Interior, Boundary };

struct NodeRoles {
  std::vector<Role> role_of;

  bool interior(NodeId v) const { return role_of[v] == Role::Interior; }
  friend bool operator==(const NodeRoles&, const NodeRoles&) = default;
};

/// v is interior iff every in- and out-neighbor other than v lies in v's block.
NodeRoles classify_roles(const Graph& g, const Partition& p);

// Directed strata use all four; undirected strata use II, IB, BB.
enum class Stratum : std::uint8_t { II = 0, IB = 1, BI = 2, BB = 3 };
inline constexpr std::size_t kStrata = 4;

std::string_view stratum_name(Stratum t, bool directed) noexcept;
std::span<const Stratum> strata_for(bool directed) noexcept;
// Intra-group strata that enter the pooled sample.
std::span<const Stratum> intra_strata_for(bool directed) noexcept;

struct StratifiedEntry {
  NodeId tail;
  NodeId head;
  double weight;
  Stratum stratum;
};

/**
 * Arc stratification by endpoint roles.
 *
 * Units: `mass[T]` sums A^(T)_ij over the arc view (undirected edges count
 * in both orientations), so the masses add up to sum_ij A_ij. `edge_mass[T]`
 * sums stored weights (each undirected edge once) and `edge_count[T]` counts
 * stored arcs or edges. `count[T]` counts arc-view entries.
 */
struct Stratification {
  bool directed = true;
  bool unit_weights = true;
  Partition partition;
  NodeRoles roles;
  std::vector<Stratum> stratum_of;       // per stored arc of the graph
  std::vector<StratifiedEntry> entries;  // arc view, sorted by (tail, head)
  std::array<double, kStrata> mass{};
  std::array<double, kStrata> edge_mass{};
  std::array<std::size_t, kStrata> count{};
  std::array<std::size_t, kStrata> edge_count{};
  std::array<std::vector<double>, kStrata> type_out_strength;
  std::array<std::vector<double>, kStrata> type_in_strength;

  std::size_t node_count() const noexcept { return roles.role_of.size(); }
  std::span<const Stratum> strata() const noexcept { return strata_for(directed); }
  double total_mass() const noexcept;
};

// Throws RoleMismatch when `roles` differs from classify_roles(g, p).
Stratification stratify_arcs(const Graph& g, const Partition& p, const NodeRoles& roles);
inline Stratification stratify_arcs(const Graph& g, const Partition& p) {
  return stratify_arcs(g, p, classify_roles(g, p));
}

struct RefinementMasses {
  std::size_t labels = 0;  // R = block count of Q
  // table[T][r * R + s] = sum of A^(T)_ij over arcs with Q(i)=r, Q(j)=s (arc view).
  std::array<std::vector<double>, kStrata> table;

  double at(Stratum t, BlockId r, BlockId s) const {
    return table[static_cast<std::size_t>(t)][r * labels + s];
  }
};

RefinementMasses refinement_masses(const Graph& g, const Partition& p, const Partition& q);

enum class FlowDirection { Out, In };

/// 1 - sum_k (k_{v->V_k} / k_v)^2, or nullopt when v has zero strength in
/// the given direction.
std::optional<double> participation(const Graph& g, const Partition& p, NodeId v, FlowDirection dir);

}  // namespace ibprof
