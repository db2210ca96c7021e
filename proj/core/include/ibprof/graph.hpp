#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ibprof {

using NodeId = std::uint32_t;

enum class Directedness { Directed, Undirected };

struct Arc {
  NodeId tail = 0;
  NodeId head = 0;
  double weight = 1.0;

  friend bool operator==(const Arc&, const Arc&) = default;
};

struct StrengthVectors {
  std::vector<double> out_strength;  // k_i^out = sum_j A_ij
  std::vector<double> in_strength;   // k_j^in  = sum_i A_ij
  double total_mass = 0.0;           // sum A_ij directed, half of it undirected
};

/**
 * Weighted graph on nodes 0..n-1, immutable after construction.
 *
 * Directed graphs store one arc per nonzero A_ij. Undirected graphs store
 * each edge {u,v} once with tail <= head and A_uv = A_vu = w; a self-loop
 * {u,u} contributes A_uu = 2w.
 *
 * The "adjacency entries" are the arc view used by every formula that sums
 * over A_ij: directed arcs as stored, undirected edges in both orientations.
 * An undirected self-loop appears as two (u,u,w) entries.
 */
class Graph {
 public:
  Graph() = default;

  // Validates ids and weights, merges parallel entries by summation,
  // canonicalizes undirected edges and drops zero-weight entries.
  static Graph build(std::size_t n, std::span<const Arc> edges, Directedness directedness);

  std::size_t node_count() const noexcept { return n_; }
  bool directed() const noexcept { return directed_; }
  Directedness directedness() const noexcept {
    return directed_ ? Directedness::Directed : Directedness::Undirected;
  }

  // Stored arcs (edges once for undirected), sorted by (tail, head).
  std::span<const Arc> arcs() const noexcept { return arcs_; }

  // Arc view sorted by (tail, head), with per-tail offsets.
  std::span<const Arc> adjacency_entries() const noexcept { return out_entries_; }
  std::span<const Arc> out_entries(NodeId v) const noexcept {
    return std::span<const Arc>(out_entries_).subspan(out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]);
  }
  // Arc view sorted by (head, tail).
  std::span<const Arc> in_entries(NodeId v) const noexcept {
    return std::span<const Arc>(in_entries_).subspan(in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]);
  }

  StrengthVectors strengths() const;

  // True when every stored weight equals 1.
  bool unit_weights() const noexcept { return unit_weights_; }

  // Symmetric digraph with the same adjacency matrix (identity on directed graphs).
  Graph as_directed() const;

 private:
  std::size_t n_ = 0;
  bool directed_ = true;
  bool unit_weights_ = true;
  std::vector<Arc> arcs_;
  std::vector<Arc> out_entries_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<Arc> in_entries_;
  std::vector<std::size_t> in_offsets_{0};
};

inline StrengthVectors strengths(const Graph& g) { return g.strengths(); }

struct RadiusEstimate {
  double value = 0.0;
  double lower = 0.0;  // Collatz-Wielandt bounds of the final iterate
  double upper = 0.0;
  std::size_t iterations = 0;
  bool strongly_connected = false;
};

/// Spectral radius of the adjacency matrix by shifted power iteration.
///
/// Each strongly connected component is iterated on its own from the
/// all-ones vector; the radius of a reducible nonnegative matrix is the
/// largest component radius. Iteration stops once the Collatz-Wielandt
/// bracket satisfies upper - lower <= tol * max(1, upper).
RadiusEstimate spectral_radius(const Graph& g, double tol = 1e-12, std::size_t max_iterations = 100000);

/// Unit-norm Perron vector of A (or of A^T when `transpose`). Requires a
/// strongly connected graph.
std::vector<double> perron_vector(const Graph& g, bool transpose, double tol = 1e-12,
                                  std::size_t max_iterations = 100000);

bool is_strongly_connected(const Graph& g);

// Component id per node, numbered in order of discovery.
std::vector<std::uint32_t> strongly_connected_components(const Graph& g);

// A'_uv = A_uv + A_vu for u != v; self-loops dropped. Undirected inputs keep
// their weights and lose only self-loops.
Graph undirected_projection(const Graph& g);

}  // namespace ibprof
