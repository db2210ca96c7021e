#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ibprof/assort.hpp"
#include "ibprof/graph.hpp"
#include "ibprof/stratify.hpp"

namespace ibprof {

// How arcs are weighted in the pooled samples: by arc count, or by A_ij.
enum class PiMode { Weighted, UnweightedCounts };

std::string_view to_string(PiMode m) noexcept;

// Counts on unit-weight graphs, weights otherwise.
PiMode default_pi_mode(const Stratification& s) noexcept;

struct StratumMoments {
  Stratum stratum;
  std::size_t count = 0;
  double pi = 0.0;
  double mean_x = 0.0;  // tail endpoint
  double mean_y = 0.0;  // head endpoint
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double cov = 0.0;
  std::optional<double> r;
};

struct CollapseReport {
  bool directed = true;
  PiMode mode = PiMode::UnweightedCounts;
  std::vector<StratumMoments> strata;  // intra-group strata only
  double mean_x_in = 0.0;
  double mean_y_in = 0.0;
  double sigma_x_in = 0.0;
  double sigma_y_in = 0.0;
  double cov_in = 0.0;
  std::optional<double> r_in;
  double cov_within = 0.0;   // sum_T pi_T cov_T
  double cov_between = 0.0;  // sum_T pi_T (mean_x_T - mean_x_in)(mean_y_T - mean_y_in)
  double scale = 0.0;        // largest second moment involved, for relative residuals
  double cov_residual = 0.0; // cov_in - cov_within - cov_between
  // r_in minus the aggregated right-hand side; present when every sigma > 0.
  std::optional<double> corr_residual;

  double relative_cov_residual() const noexcept { return scale > 0.0 ? cov_residual / scale : cov_residual; }
};

/// Law-of-total-covariance split of the pooled intra-group endpoint sample.
CollapseReport collapse_decomposition(const Stratification& s, std::span<const double> x, PiMode mode);
inline CollapseReport collapse_decomposition(const Stratification& s, std::span<const double> x) {
  return collapse_decomposition(s, x, default_pi_mode(s));
}

struct ConditionCheck {
  bool holds = false;
  double margin = 0.0;  // >= 0 (or > 0 for strict conditions) when it holds
};

struct GroupSignStats {
  BlockId block = 0;
  std::size_t interior = 0;
  std::size_t boundary = 0;
  std::optional<double> mu_boundary;
  std::optional<double> mu_interior;
  std::size_t bi_count = 0;
  double bi_weight = 0.0;
  double pi = 0.0;
  std::optional<double> mean_tail;  // X_k
  std::optional<double> mean_head;  // Y_k
  std::optional<double> cov;        // Cov_k
};

enum class SignVerdict { NegativePredicted, NotApplicable };

std::string_view to_string(SignVerdict v) noexcept;

struct SignConditionsReport {
  PiMode mode = PiMode::UnweightedCounts;
  std::vector<GroupSignStats> groups;
  double mean_tail = 0.0;  // X over all B->I arcs
  double mean_head = 0.0;  // Y
  double var_tail = 0.0;
  double var_head = 0.0;
  double cov_within = 0.0;  // sum_k pi_k Cov_k
  double between = 0.0;     // sum_k pi_k (X_k - X)(Y_k - Y)
  double spread = 0.0;      // range of the attribute over B->I endpoints
  ConditionCheck boundary_dominance;       // (i)
  ConditionCheck endpoint_mean_dominance;  // (ii)
  ConditionCheck nondegenerate;            // (iii)
  ConditionCheck within_nonpositive;       // (iv)
  ConditionCheck between_nonpositive;      // (v)
  bool strict_within = false;
  bool strict_between = false;
  bool strictness = false;
  SignVerdict verdict = SignVerdict::NotApplicable;
  Coefficient observed;  // B->I entry of profile_scalar
  // Pearson correlation of the B->I sample under `mode`; equals `observed`
  // whenever the mode matches the graph's weighting.
  Coefficient observed_sample;
};

/// Evaluates the five sufficient conditions for a negative B->I component.
/// Requires a directed stratification (use Graph::as_directed for undirected
/// inputs) of (g, p).
SignConditionsReport sign_conditions(const Graph& g, const Partition& p, const Stratification& s,
                                     std::span<const double> x, PiMode mode);
inline SignConditionsReport sign_conditions(const Graph& g, const Partition& p, const Stratification& s,
                                            std::span<const double> x) {
  return sign_conditions(g, p, s, x, default_pi_mode(s));
}

}  // namespace ibprof
