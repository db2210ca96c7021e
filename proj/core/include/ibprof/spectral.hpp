#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ibprof/graph.hpp"
#include "ibprof/stratify.hpp"

namespace ibprof {

enum class Remedy { None, Lazy, Teleport };

std::string_view to_string(Remedy r) noexcept;

struct WalkSpec {
  Remedy remedy = Remedy::None;
  double alpha = 0.85;       // teleport damping
  std::vector<double> pi0;   // teleport target; empty means uniform

  static WalkSpec none() { return {}; }
  static WalkSpec lazy() { return {Remedy::Lazy, 0.85, {}}; }
  static WalkSpec teleport(double alpha = 0.85, std::vector<double> pi0 = {}) {
    return {Remedy::Teleport, alpha, std::move(pi0)};
  }
  // Lazy for strongly connected graphs, teleport(0.85, uniform) otherwise.
  static WalkSpec automatic(const Graph& g);
};

/// Row-stochastic walk matrix P(u,v) = A_uv / k_u^out with the remedy applied.
/// Zero-strength rows stay zero under None and Lazy; Teleport replaces them
/// by pi0 before damping.
Eigen::MatrixXd transition_matrix(const Graph& g, const WalkSpec& spec);

struct StationaryResult {
  std::vector<double> phi;
  double residual = 0.0;  // || phi^T P - phi^T ||_1
  std::size_t iterations = 0;
  bool converged = false;
};

/// Left power iteration from the uniform vector. A chain that does not reach
/// `tol` returns its last iterate with converged = false.
StationaryResult stationary(const Eigen::MatrixXd& p, double tol = 1e-12, std::size_t max_iterations = 1000000);

/// Phi(S) = sum_{u in S, v not in S} phi(u) P(u,v) / min(phi(S), phi(V \ S)).
double directed_conductance(std::span<const double> phi, const Eigen::MatrixXd& p, std::span<const NodeId> subset);

struct CheegerResult {
  double h = 0.0;
  std::vector<NodeId> argmin;  // one minimizing subset
};

/// Exact minimum of Phi(S) over all proper nonempty subsets.
CheegerResult cheeger_constant_bruteforce(std::span<const double> phi, const Eigen::MatrixXd& p,
                                          std::size_t n_max = 18);

/// L = I - (Phi^{1/2} P Phi^{-1/2} + Phi^{-1/2} P^T Phi^{1/2}) / 2.
Eigen::MatrixXd chung_laplacian(std::span<const double> phi, const Eigen::MatrixXd& p);

/// I - D^{-1/2} A D^{-1/2} for an undirected graph without isolated nodes.
Eigen::MatrixXd normalized_laplacian(const Graph& g_undirected);

struct EigenDecomposition {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column i pairs with values(i)
};

EigenDecomposition eigen_sym(const Eigen::MatrixXd& m);

struct BlockConductance {
  BlockId block = 0;
  std::optional<double> phi;  // unset when the block is all of V or has zero mass
};

struct SpectralReport {
  WalkSpec walk;
  StationaryResult stationary;
  std::vector<double> lambda;
  std::optional<double> h_exact;
  std::vector<NodeId> h_argmin;
  std::optional<bool> sandwich_holds;
  std::vector<BlockConductance> blocks;
  std::optional<double> phi_max;
};

std::vector<BlockConductance> block_conductances(std::span<const double> phi, const Eigen::MatrixXd& p,
                                                 const Partition& partition);

/// Chung Laplacian spectrum, exact Cheeger constant when n <= n_max, and
/// per-block conductances when a partition is given.
SpectralReport cheeger_check(const Graph& g, const WalkSpec& spec, const Partition* partition = nullptr,
                             std::size_t n_max = 18);

inline constexpr double kCheegerSlack = 1e-8;

struct SpectralProxy {
  std::size_t k = 0;
  std::vector<double> s_k;
  std::vector<double> s_inf;
  std::vector<double> lambda;  // normalized Laplacian spectrum, ascending
  double tail_bound = 0.0;     // 1 / lambda_{k+2}; 0 when k = n - 1
};

/// s_k(v) = sum_{i=2}^{k+1} u_i(v)^2 / lambda_i of the normalized Laplacian.
SpectralProxy spectral_proxy(const Graph& g_undirected, std::size_t k);

}  // namespace ibprof
