#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ibprof/graph.hpp"
#include "ibprof/stratify.hpp"

namespace ibprof {

enum class UndefinedReason { EmptyStratum, ZeroVariance, ZeroDenominator };

std::string_view to_string(UndefinedReason r) noexcept;

// A coefficient that is either a number or undefined with a reason.
struct Coefficient {
  std::optional<double> value;
  std::optional<UndefinedReason> reason;

  static Coefficient defined(double v) { return {v, std::nullopt}; }
  static Coefficient undefined(UndefinedReason r) { return {std::nullopt, r}; }
  bool has_value() const noexcept { return value.has_value(); }
};

struct MixingMatrix {
  Eigen::MatrixXd e;  // e(p,q): fraction of arc mass from label p to label q
  Eigen::VectorXd a;  // row marginals
  Eigen::VectorXd b;  // column marginals
};

/// Adjacency form: [(1/M) sum A_ij x_i x_j - mu_out mu_in] / (sigma_out sigma_in)
/// with strength-weighted moments. M = sum_ij A_ij, so undirected graphs use
/// both orientations of every edge.
Coefficient rho_scalar(const Graph& g, std::span<const double> x);

/// Pearson correlation over per-arc endpoint samples (tail value, head value)
/// weighted by A_ij.
Coefficient rho_scalar_pearson(const Graph& g, std::span<const double> x);

struct CategoricalResult {
  Coefficient rho;
  MixingMatrix mixing;
};

/// (Tr e - sum a_p b_p) / (1 - sum a_p b_p). `label_count` of 0 means max label + 1.
CategoricalResult rho_categorical(const Graph& g, std::span<const BlockId> labels, std::size_t label_count = 0);

/// (1/M) sum_ij (A_ij - gamma k_i^out k_j^in / M) [same block], M = sum_ij A_ij.
double directed_modularity(const Graph& g, const Partition& p, double gamma = 1.0);

struct ModularityConsistency {
  double rho = 0.0;
  double q = 0.0;
  double denom = 0.0;
};

/// rho(x_P), Q(G,P) at gamma=1 and 1 - sum a_p b_p; throws Internal when
/// rho != Q/denom beyond 1e-10.
ModularityConsistency rho_modularity_consistency(const Graph& g, const Partition& p);

struct ProfileEntry {
  Stratum stratum;
  double mass = 0.0;       // arc-view mass
  double edge_mass = 0.0;  // stored-edge mass
  std::size_t count = 0;   // arc-view entries
  Coefficient rho;
};

struct AssortProfile {
  bool directed = true;
  std::vector<ProfileEntry> entries;

  const ProfileEntry* find(Stratum t) const;
  const Coefficient& at(Stratum t) const;
};

AssortProfile profile_scalar(const Stratification& s, std::span<const double> x);
AssortProfile profile_categorical(const Stratification& s, std::span<const BlockId> labels,
                                  std::size_t label_count = 0);

/// -sum a_p^2 / (1 - sum a_p^2).
double multipartite_rho(std::span<const double> a, double tol = 1e-12);

}  // namespace ibprof
