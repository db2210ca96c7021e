#include "ibprof/assort.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ibprof/error.hpp"
#include "moments.hpp"

namespace ibprof {

namespace {

constexpr double kZeroScale = 1e-14;
constexpr double kRangeSlack = 1e-12;

void check_attribute(const Graph& g, std::size_t size) {
  if (size != g.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "attribute has " + std::to_string(size) + " entries, graph has " +
                                                std::to_string(g.node_count()) + " nodes");
  }
}

Coefficient finish(double cov, double var_out, double var_in, double spread_out, double spread_in) {
  if (var_out <= kZeroScale * spread_out * spread_out || var_in <= kZeroScale * spread_in * spread_in) {
    return Coefficient::undefined(UndefinedReason::ZeroVariance);
  }
  const double r = cov / std::sqrt(var_out * var_in);
  if (!(std::abs(r) <= 1.0 + kRangeSlack)) {
    throw Error(ErrorCode::Internal, "assortativity outside [-1,1]: " + std::to_string(r));
  }
  return Coefficient::defined(r);
}

// Adjacency form over a set of weighted entries with their own strengths.
template <class Entries>
Coefficient adjacency_form(const Entries& entries, std::span<const double> k_out, std::span<const double> k_in,
                           std::span<const double> x) {
  double m = 0.0;
  for (const auto& e : entries) m += e.weight;
  if (m <= 0.0) return Coefficient::undefined(UndefinedReason::EmptyStratum);

  // Strength-weighted node moments: the first pass fixes the means.
  std::vector<double> xs, ws_out, ws_in;
  double lo_out = INFINITY, hi_out = -INFINITY, lo_in = INFINITY, hi_in = -INFINITY;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (k_out[i] > 0.0) {
      lo_out = std::min(lo_out, x[i]);
      hi_out = std::max(hi_out, x[i]);
    }
    if (k_in[i] > 0.0) {
      lo_in = std::min(lo_in, x[i]);
      hi_in = std::max(hi_in, x[i]);
    }
  }
  const double mu_out = detail::shifted_mean(x, k_out);
  const double mu_in = detail::shifted_mean(x, k_in);
  const double ref_out = lo_out == hi_out ? lo_out : mu_out;
  const double ref_in = lo_in == hi_in ? lo_in : mu_in;

  double var_out = 0.0, var_in = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d_out = x[i] - ref_out, d_in = x[i] - ref_in;
    var_out += k_out[i] * d_out * d_out;
    var_in += k_in[i] * d_in * d_in;
  }
  for (const auto& e : entries) cov += e.weight * (x[e.tail] - ref_out) * (x[e.head] - ref_in);
  return finish(cov / m, var_out / m, var_in / m, hi_out - lo_out, hi_in - lo_in);
}

CategoricalResult categorical_form(std::span<const StratifiedEntry> entries, std::span<const BlockId> labels,
                                   std::size_t k, bool filter, Stratum t) {
  CategoricalResult r;
  r.mixing.e = Eigen::MatrixXd::Zero(k, k);
  double m = 0.0;
  for (const auto& e : entries) {
    if (filter && e.stratum != t) continue;
    r.mixing.e(labels[e.tail], labels[e.head]) += e.weight;
    m += e.weight;
  }
  if (m <= 0.0) {
    r.mixing.a = Eigen::VectorXd::Zero(k);
    r.mixing.b = Eigen::VectorXd::Zero(k);
    r.rho = Coefficient::undefined(UndefinedReason::EmptyStratum);
    return r;
  }
  r.mixing.e /= m;
  r.mixing.a = r.mixing.e.rowwise().sum();
  r.mixing.b = r.mixing.e.colwise().sum().transpose();
  const double ab = r.mixing.a.dot(r.mixing.b);
  const double denom = 1.0 - ab;
  if (denom <= kZeroScale) {
    r.rho = Coefficient::undefined(UndefinedReason::ZeroDenominator);
    return r;
  }
  const double v = (r.mixing.e.trace() - ab) / denom;
  if (!(std::abs(v) <= 1.0 + kRangeSlack)) {
    throw Error(ErrorCode::Internal, "categorical assortativity outside [-1,1]: " + std::to_string(v));
  }
  r.rho = Coefficient::defined(v);
  return r;
}

std::size_t label_range(std::span<const BlockId> labels, std::size_t label_count) {
  std::size_t k = 0;
  for (BlockId l : labels) k = std::max<std::size_t>(k, std::size_t{l} + 1);
  if (label_count == 0) return k;
  if (k > label_count) throw Error(ErrorCode::InvalidArgument, "label exceeds label_count");
  return label_count;
}

std::vector<StratifiedEntry> untyped_entries(const Graph& g) {
  std::vector<StratifiedEntry> out;
  out.reserve(g.adjacency_entries().size());
  for (const Arc& a : g.adjacency_entries()) out.push_back({a.tail, a.head, a.weight, Stratum::II});
  return out;
}

}  // namespace

std::string_view to_string(UndefinedReason r) noexcept {
  switch (r) {
    case UndefinedReason::EmptyStratum:
      return "empty_stratum";
    case UndefinedReason::ZeroVariance:
      return "zero_variance";
    case UndefinedReason::ZeroDenominator:
      return "zero_denominator";
  }
  return "unknown";
}

Coefficient rho_scalar(const Graph& g, std::span<const double> x) {
  check_attribute(g, x.size());
  if (g.arcs().empty()) throw Error(ErrorCode::EmptyGraph, "rho_scalar: graph has no arcs");
  auto st = g.strengths();
  return adjacency_form(g.adjacency_entries(), st.out_strength, st.in_strength, x);
}

Coefficient rho_scalar_pearson(const Graph& g, std::span<const double> x) {
  check_attribute(g, x.size());
  if (g.arcs().empty()) throw Error(ErrorCode::EmptyGraph, "rho_scalar_pearson: graph has no arcs");
  std::vector<detail::PairSample> samples;
  samples.reserve(g.adjacency_entries().size());
  for (const Arc& a : g.adjacency_entries()) samples.push_back({x[a.tail], x[a.head], a.weight});
  auto m = detail::pair_moments(samples);
  return finish(m.cov, m.var_x, m.var_y, m.spread_x, m.spread_y);
}

CategoricalResult rho_categorical(const Graph& g, std::span<const BlockId> labels, std::size_t label_count) {
  if (labels.size() != g.node_count()) throw Error(ErrorCode::InvalidArgument, "label vector size mismatch");
  if (g.arcs().empty()) throw Error(ErrorCode::EmptyGraph, "rho_categorical: graph has no arcs");
  auto entries = untyped_entries(g);
  return categorical_form(entries, labels, label_range(labels, label_count), false, Stratum::II);
}

double directed_modularity(const Graph& g, const Partition& p, double gamma) {
  if (p.node_count() != g.node_count()) throw Error(ErrorCode::PartitionSizeMismatch, "partition size mismatch");
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  auto st = g.strengths();
  const double m = g.directed() ? st.total_mass : 2.0 * st.total_mass;
  if (m <= 0.0) throw Error(ErrorCode::EmptyGraph, "directed_modularity: graph has no arcs");
  double inside = 0.0;
  for (const Arc& a : g.adjacency_entries()) {
    if (p.block_of(a.tail) == p.block_of(a.head)) inside += a.weight;
  }
  std::vector<double> kout(p.block_count(), 0.0), kin(p.block_count(), 0.0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    kout[p.block_of(v)] += st.out_strength[v];
    kin[p.block_of(v)] += st.in_strength[v];
  }
  double null_term = 0.0;
  for (std::size_t b = 0; b < p.block_count(); ++b) null_term += kout[b] * kin[b];
  return (inside - gamma * null_term / m) / m;
}

ModularityConsistency rho_modularity_consistency(const Graph& g, const Partition& p) {
  auto cat = rho_categorical(g, p.labels(), p.block_count());
  ModularityConsistency r;
  r.denom = 1.0 - cat.mixing.a.dot(cat.mixing.b);
  r.q = directed_modularity(g, p, 1.0);
  if (!cat.rho.has_value()) {
    throw Error(ErrorCode::ZeroDenominator, "1 - sum a_p b_p is zero");
  }
  r.rho = *cat.rho.value;
  if (std::abs(r.rho - r.q / r.denom) > 1e-10) {
    throw Error(ErrorCode::Internal, "assortativity/modularity identity violated");
  }
  return r;
}

const ProfileEntry* AssortProfile::find(Stratum t) const {
  for (const auto& e : entries)
    if (e.stratum == t) return &e;
  return nullptr;
}

const Coefficient& AssortProfile::at(Stratum t) const {
  const auto* e = find(t);
  if (!e) throw Error(ErrorCode::InvalidArgument, "stratum not present in this profile");
  return e->rho;
}

namespace {

AssortProfile profile_shell(const Stratification& s) {
  AssortProfile p;
  p.directed = s.directed;
  for (Stratum t : s.strata()) {
    const auto i = static_cast<std::size_t>(t);
    p.entries.push_back({t, s.mass[i], s.edge_mass[i], s.count[i], Coefficient::undefined(UndefinedReason::EmptyStratum)});
  }
  return p;
}

}  // namespace

AssortProfile profile_scalar(const Stratification& s, std::span<const double> x) {
  if (x.size() != s.node_count()) throw Error(ErrorCode::InvalidArgument, "attribute size mismatch");
  AssortProfile p = profile_shell(s);
  for (auto& e : p.entries) {
    if (e.count == 0 || e.mass <= 0.0) continue;
    const auto i = static_cast<std::size_t>(e.stratum);
    std::vector<StratifiedEntry> sub;
    sub.reserve(e.count);
    for (const auto& a : s.entries)
      if (a.stratum == e.stratum) sub.push_back(a);
    e.rho = adjacency_form(sub, s.type_out_strength[i], s.type_in_strength[i], x);
  }
  return p;
}

AssortProfile profile_categorical(const Stratification& s, std::span<const BlockId> labels, std::size_t label_count) {
  if (labels.size() != s.node_count()) throw Error(ErrorCode::InvalidArgument, "label vector size mismatch");
  const std::size_t k = label_range(labels, label_count);
  AssortProfile p = profile_shell(s);
  for (auto& e : p.entries) {
    if (e.count == 0 || e.mass <= 0.0) continue;
    e.rho = categorical_form(s.entries, labels, k, true, e.stratum).rho;
  }
  return p;
}

double multipartite_rho(std::span<const double> a, double tol) {
  double sum = 0.0, sq = 0.0;
  for (double v : a) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "edge-end fractions must be nonnegative");
    sum += v;
    sq += v * v;
  }
  if (std::abs(sum - 1.0) > tol) throw Error(ErrorCode::InvalidArgument, "edge-end fractions must sum to 1");
  if (1.0 - sq <= tol) throw Error(ErrorCode::DegenerateMarginals, "sum a_p^2 = 1");
  return -sq / (1.0 - sq);
}

}  // namespace ibprof
