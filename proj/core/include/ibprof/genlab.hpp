#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ibprof/graph.hpp"
#include "ibprof/sis.hpp"
#include "ibprof/stratify.hpp"

namespace ibprof {

enum class SBMModel {
  Planted,    // every pair independent: p within blocks, q across
  Amplified,  // cross arcs first; their endpoints become gateways with boosted within-block in-degree
};

std::string_view to_string(SBMModel m) noexcept;

struct SBMSpec {
  std::vector<std::size_t> block_sizes;
  double p_within = 0.0;
  double q_between = 0.0;
  double weight = 1.0;
  Directedness directedness = Directedness::Directed;
  std::uint64_t seed = 0;
  SBMModel model = SBMModel::Planted;

  void validate() const;
  std::size_t node_count() const;
};

/**
 * Seeded planted-partition graph. Pairs are visited in a fixed order
 * (directed: u ascending, then v ascending, u != v; undirected: u < v) and
 * each draws one uniform from Rng(seed).
 *
 * Amplified model: pass 1 visits only cross-block pairs (probability q);
 * every endpoint of a realized cross pair is a gateway. Pass 2 visits
 * within-block pairs with probability min(1, 2p) when the head (undirected:
 * either endpoint) is a gateway and p otherwise.
 */
std::pair<Graph, Partition> sbm(const SBMSpec& spec);

struct Instance {
  std::string name;
  Graph graph;
  Partition partition;
  std::optional<std::vector<double>> attribute;
  std::optional<std::vector<double>> attribute_b;  // second attribute of corollary_pair
};

Instance two_triangle_bridge();
Instance two_triangle_bridge_directed();
Instance dir_cycle(std::size_t n);
Instance k22();
Instance regular(std::size_t n, std::size_t d);
Instance amplified(double p, double q, std::vector<std::size_t> sizes, std::uint64_t seed);
Instance corollary_pair();

/// Parses names such as "dir_cycle(4)", "regular(8,4)" or
/// "amplified(0.4,0.004,30x30,7)". Throws UnknownFixture.
Instance fixture(std::string_view name);

struct SweepRecord {
  double q_between = 0.0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::optional<double> phi_max;
  std::optional<double> min_gap;
  bool dominance_all = false;
  Coefficient r_bi;
  bool negative = false;  // r_BI defined and < 0
  bool prediction = false;
  ChainVerdict verdict = ChainVerdict::DiseaseFree;
};

struct SweepSummary {
  double q_between = 0.0;
  std::size_t replicates = 0;
  double dominance_fraction = 0.0;
  double negative_fraction = 0.0;
  double both_fraction = 0.0;  // dominance in every group and r_BI < 0
  double premises_fraction = 0.0;
};

struct SweepResult {
  SBMSpec base;
  SISParams params;
  std::vector<SweepRecord> records;  // sorted by q_between, then replicate
  std::vector<SweepSummary> summary;
};

/// Runs implication_chain on sbm(base with q_between = q, seed =
/// derive_seed(base.seed, q index, replicate)) for every pair. Work is spread
/// over `jobs` threads; results do not depend on it.
SweepResult chain_sweep(const SBMSpec& base, std::span<const double> q_values, const SISParams& params,
                        std::size_t replicates, std::size_t jobs = 1);

}  // namespace ibprof
