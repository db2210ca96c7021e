#include "ibprof/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "ibprof/error.hpp"

namespace ibprof {

std::string_view to_string(Remedy r) noexcept {
  switch (r) {
    case Remedy::None:
      return "none";
    case Remedy::Lazy:
      return "lazy";
    case Remedy::Teleport:
      return "teleport";
  }
  return "unknown";
}

WalkSpec WalkSpec::automatic(const Graph& g) {
  return is_strongly_connected(g) ? lazy() : teleport();
}

namespace {

std::vector<double> teleport_target(const WalkSpec& spec, std::size_t n) {
  if (spec.pi0.empty()) return std::vector<double>(n, 1.0 / static_cast<double>(n));
  if (spec.pi0.size() != n) throw Error(ErrorCode::InvalidArgument, "pi0 size mismatch");
  double sum = 0.0;
  for (double v : spec.pi0) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "pi0 must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "pi0 must sum to 1");
  return spec.pi0;
}

}  // namespace

Eigen::MatrixXd transition_matrix(const Graph& g, const WalkSpec& spec) {
  const std::size_t n = g.node_count();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  auto st = g.strengths();
  for (const Arc& a : g.adjacency_entries()) p(a.tail, a.head) += a.weight / st.out_strength[a.tail];

  switch (spec.remedy) {
    case Remedy::None:
      break;
    case Remedy::Lazy:
      p = 0.5 * (Eigen::MatrixXd::Identity(n, n) + p);
      break;
    case Remedy::Teleport: {
      if (!(spec.alpha >= 0.0 && spec.alpha < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "teleport requires 0 <= alpha < 1");
      }
      auto pi0 = teleport_target(spec, n);
      Eigen::RowVectorXd target = Eigen::Map<const Eigen::RowVectorXd>(pi0.data(), static_cast<Eigen::Index>(n));
      for (std::size_t u = 0; u < n; ++u) {
        if (st.out_strength[u] <= 0.0) p.row(u) = target;
        p.row(u) = spec.alpha * p.row(u) + (1.0 - spec.alpha) * target;
      }
      break;
    }
  }
  return p;
}

StationaryResult stationary(const Eigen::MatrixXd& p, double tol, std::size_t max_iterations) {
  const auto n = static_cast<std::size_t>(p.rows());
  if (p.cols() != p.rows()) throw Error(ErrorCode::InvalidArgument, "transition matrix must be square");
  StationaryResult r;
  if (n == 0) {
    r.converged = true;
    return r;
  }
  struct Entry {
    std::size_t u, v;
    double w;
  };
  std::vector<Entry> nz;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (p(u, v) != 0.0) nz.push_back({u, v, p(u, v)});

  std::vector<double> phi(n, 1.0 / static_cast<double>(n)), next(n);
  auto step = [&](const std::vector<double>& in, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& e : nz) out[e.v] += in[e.u] * e.w;
  };
  auto residual = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i] - b[i]);
    return s;
  };

  step(phi, next);
  r.residual = residual(next, phi);
  while (r.residual > tol && r.iterations < max_iterations) {
    ++r.iterations;
    double sum = 0.0;
    for (double v : next) sum += v;
    if (!(sum > 0.0)) break;
    for (std::size_t i = 0; i < n; ++i) phi[i] = std::max(0.0, next[i] / sum);
    step(phi, next);
    r.residual = residual(next, phi);
  }
  r.converged = r.residual <= tol;
  r.phi = std::move(phi);
  return r;
}

double directed_conductance(std::span<const double> phi, const Eigen::MatrixXd& p, std::span<const NodeId> subset) {
  const std::size_t n = phi.size();
  if (static_cast<std::size_t>(p.rows()) != n) throw Error(ErrorCode::InvalidArgument, "phi/P size mismatch");
  std::vector<char> in(n, 0);
  std::size_t size = 0;
  for (NodeId v : subset) {
    if (v >= n) throw Error(ErrorCode::NodeIdOutOfRange, "subset node out of range");
    if (!in[v]) ++size;
    in[v] = 1;
  }
  if (size == 0 || size == n) throw Error(ErrorCode::TrivialSet, "subset must be proper and nonempty");
  double mass = 0.0, rest = 0.0, flow = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    (in[u] ? mass : rest) += phi[u];
    if (!in[u]) continue;
    for (std::size_t v = 0; v < n; ++v)
      if (!in[v]) flow += phi[u] * p(u, v);
  }
  if (!(mass > 0.0) || !(rest > 0.0)) throw Error(ErrorCode::ZeroMass, "subset or complement has zero mass");
  return flow / std::min(mass, rest);
}

CheegerResult cheeger_constant_bruteforce(std::span<const double> phi, const Eigen::MatrixXd& p, std::size_t n_max) {
  const std::size_t n = phi.size();
  if (n > n_max || n >= 63) {
    throw Error(ErrorCode::TooLarge, "exact Cheeger constant limited to n <= " + std::to_string(n_max));
  }
  if (n < 2) throw Error(ErrorCode::TrivialSet, "need at least two nodes");
  double total = 0.0;
  for (double v : phi) total += v;

  // Gray-code walk: one node toggles per step, flow and mass update in O(n).
  std::vector<char> in(n, 0);
  double flow = 0.0, mass = 0.0;
  double best = INFINITY;
  std::uint64_t best_mask = 0, mask = 0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < count; ++i) {
    const auto v = static_cast<std::size_t>(std::countr_zero(i));
    const bool adding = !in[v];
    double out_of_v = 0.0, into_v = 0.0;
    for (std::size_t w = 0; w < n; ++w) {
      if (w == v) continue;
      if (in[w]) {
        into_v += phi[w] * p(w, v);
      } else {
        out_of_v += phi[v] * p(v, w);
      }
    }
    if (adding) {
      flow += out_of_v - into_v;
      mass += phi[v];
    } else {
      // v leaves S: its arcs to outside stop counting, arcs from S into v start.
      flow += into_v - out_of_v;
      mass -= phi[v];
    }
    in[v] = adding;
    mask ^= std::uint64_t{1} << v;
    if (mask == count - 1) continue;
    const double small = std::min(mass, total - mass);
    if (small <= 0.0) continue;
    const double value = flow / small;
    if (value < best) {
      best = value;
      best_mask = mask;
    }
  }
  if (!std::isfinite(best)) throw Error(ErrorCode::ZeroMass, "every proper subset has zero mass on one side");

  CheegerResult r;
  for (std::size_t v = 0; v < n; ++v)
    if (best_mask >> v & 1U) r.argmin.push_back(static_cast<NodeId>(v));
  r.h = directed_conductance(phi, p, r.argmin);
  return r;
}

Eigen::MatrixXd chung_laplacian(std::span<const double> phi, const Eigen::MatrixXd& p) {
  const std::size_t n = phi.size();
  if (static_cast<std::size_t>(p.rows()) != n) throw Error(ErrorCode::InvalidArgument, "phi/P size mismatch");
  Eigen::VectorXd root(n), inv_root(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!(phi[v] >= 1e-15)) {
      throw Error(ErrorCode::ZeroStationaryMass, "stationary mass of node " + std::to_string(v) + " below 1e-15");
    }
    root(v) = std::sqrt(phi[v]);
    inv_root(v) = 1.0 / root(v);
  }
  Eigen::MatrixXd s = root.asDiagonal() * p * inv_root.asDiagonal();
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n) - 0.5 * (s + s.transpose());
  return 0.5 * (l + l.transpose());
}

Eigen::MatrixXd normalized_laplacian(const Graph& g) {
  if (g.directed()) throw Error(ErrorCode::NotUndirected, "normalized Laplacian needs an undirected graph");
  const std::size_t n = g.node_count();
  auto st = g.strengths();
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t v = 0; v < n; ++v) {
    if (st.out_strength[v] <= 0.0) throw Error(ErrorCode::Disconnected, "isolated node " + std::to_string(v));
  }
  for (const Arc& a : g.adjacency_entries()) {
    l(a.tail, a.head) -= a.weight / std::sqrt(st.out_strength[a.tail] * st.out_strength[a.head]);
  }
  return l;
}

EigenDecomposition eigen_sym(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::NotSymmetric, "matrix not square");
  if (m.size() > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorCode::NotSymmetric, "matrix not symmetric within 1e-10");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NonConvergence, "symmetric eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

std::vector<BlockConductance> block_conductances(std::span<const double> phi, const Eigen::MatrixXd& p,
                                                 const Partition& partition) {
  if (partition.node_count() != phi.size()) throw Error(ErrorCode::PartitionSizeMismatch, "partition size mismatch");
  std::vector<BlockConductance> out;
  auto members = partition.members();
  for (BlockId b = 0; b < members.size(); ++b) {
    BlockConductance bc{b, std::nullopt};
    if (members[b].size() < phi.size()) {
      try {
        bc.phi = directed_conductance(phi, p, members[b]);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroMass) throw;
      }
    }
    out.push_back(bc);
  }
  return out;
}

SpectralReport cheeger_check(const Graph& g, const WalkSpec& spec, const Partition* partition, std::size_t n_max) {
  SpectralReport r;
  r.walk = spec;
  const auto p = transition_matrix(g, spec);
  r.stationary = stationary(p);
  if (!r.stationary.converged) {
    throw Error(ErrorCode::NonConvergence, "stationary distribution did not converge (residual " +
                                               std::to_string(r.stationary.residual) + ")");
  }
  const auto& phi = r.stationary.phi;
  auto eig = eigen_sym(chung_laplacian(phi, p));
  r.lambda.assign(eig.values.data(), eig.values.data() + eig.values.size());
  if (g.node_count() >= 2 && g.node_count() <= n_max) {
    auto c = cheeger_constant_bruteforce(phi, p, n_max);
    r.h_exact = c.h;
    r.h_argmin = c.argmin;
    const double l2 = r.lambda[1];
    r.sandwich_holds = c.h * c.h / 2.0 - kCheegerSlack <= l2 && l2 <= 2.0 * c.h + kCheegerSlack;
  }
  if (partition) {
    r.blocks = block_conductances(phi, p, *partition);
    for (const auto& b : r.blocks) {
      if (b.phi) r.phi_max = std::max(r.phi_max.value_or(-INFINITY), *b.phi);
    }
  }
  return r;
}

SpectralProxy spectral_proxy(const Graph& g, std::size_t k) {
  if (g.directed()) throw Error(ErrorCode::NotUndirected, "spectral proxy needs an undirected graph");
  const std::size_t n = g.node_count();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "spectral proxy needs at least two nodes");
  if (k > n - 1) throw Error(ErrorCode::InvalidArgument, "k must be at most n-1");
  if (!is_strongly_connected(g)) throw Error(ErrorCode::Disconnected, "graph is disconnected");
  auto eig = eigen_sym(normalized_laplacian(g));
  if (!(eig.values(1) > 1e-12)) throw Error(ErrorCode::Disconnected, "lambda_2 is zero");

  SpectralProxy r;
  r.k = k;
  r.lambda.assign(eig.values.data(), eig.values.data() + n);
  r.s_k.assign(n, 0.0);
  r.s_inf.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    double s = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      if (i == k + 1) r.s_k[v] = s;
      const double u = eig.vectors(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(i));
      s += u * u / r.lambda[i];
    }
    r.s_inf[v] = s;
    if (k == n - 1) r.s_k[v] = s;
  }
  r.tail_bound = k + 1 < n ? 1.0 / r.lambda[k + 1] : 0.0;
  return r;
}

}  // namespace ibprof
