#include "ibprof/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ibprof/error.hpp"
#include "moments.hpp"

namespace ibprof {

namespace {

constexpr double kZeroScale = 1e-14;
constexpr double kStrictScale = 1e-12;

std::optional<double> correlation(const detail::PairMoments& m) {
  if (m.var_x <= kZeroScale * m.spread_x * m.spread_x || m.var_y <= kZeroScale * m.spread_y * m.spread_y) {
    return std::nullopt;
  }
  return m.cov / std::sqrt(m.var_x * m.var_y);
}

double sample_weight(PiMode mode, double w) { return mode == PiMode::Weighted ? w : 1.0; }

}  // namespace

std::string_view to_string(PiMode m) noexcept {
  return m == PiMode::Weighted ? "weighted" : "counts";
}

PiMode default_pi_mode(const Stratification& s) noexcept {
  return s.unit_weights ? PiMode::UnweightedCounts : PiMode::Weighted;
}

std::string_view to_string(SignVerdict v) noexcept {
  return v == SignVerdict::NegativePredicted ? "negative_predicted" : "not_applicable";
}

CollapseReport collapse_decomposition(const Stratification& s, std::span<const double> x, PiMode mode) {
  if (x.size() != s.node_count()) throw Error(ErrorCode::InvalidArgument, "attribute size mismatch");
  CollapseReport r;
  r.directed = s.directed;
  r.mode = mode;

  auto intra = intra_strata_for(s.directed);
  std::vector<detail::PairSample> pooled;
  std::vector<std::vector<detail::PairSample>> per(intra.size());
  for (const auto& e : s.entries) {
    auto it = std::find(intra.begin(), intra.end(), e.stratum);
    if (it == intra.end()) continue;
    detail::PairSample p{x[e.tail], x[e.head], sample_weight(mode, e.weight)};
    pooled.push_back(p);
    per[static_cast<std::size_t>(it - intra.begin())].push_back(p);
  }
  if (pooled.empty()) throw Error(ErrorCode::EmptyIntraGroupStrata, "no intra-group arcs");

  const auto in = detail::pair_moments(pooled);
  r.mean_x_in = in.mean_x;
  r.mean_y_in = in.mean_y;
  r.sigma_x_in = std::sqrt(in.var_x);
  r.sigma_y_in = std::sqrt(in.var_y);
  r.cov_in = in.cov;
  r.r_in = correlation(in);
  r.scale = std::max(in.var_x, in.var_y);

  bool all_sigma = r.sigma_x_in > 0.0 && r.sigma_y_in > 0.0 && r.r_in.has_value();
  double aggregated = 0.0;
  for (std::size_t i = 0; i < intra.size(); ++i) {
    const auto m = detail::pair_moments(per[i]);
    StratumMoments sm;
    sm.stratum = intra[i];
    sm.count = m.count;
    if (m.count > 0) {
      sm.pi = m.weight / in.weight;
      sm.mean_x = m.mean_x;
      sm.mean_y = m.mean_y;
      sm.sigma_x = std::sqrt(m.var_x);
      sm.sigma_y = std::sqrt(m.var_y);
      sm.cov = m.cov;
      sm.r = correlation(m);
      r.cov_within += sm.pi * sm.cov;
      r.cov_between += sm.pi * (sm.mean_x - r.mean_x_in) * (sm.mean_y - r.mean_y_in);
      if (sm.r) {
        aggregated += sm.pi * sm.sigma_x * sm.sigma_y * *sm.r;
      } else {
        all_sigma = false;
      }
    }
    r.strata.push_back(sm);
  }
  r.cov_residual = r.cov_in - r.cov_within - r.cov_between;
  if (all_sigma) {
    r.corr_residual = *r.r_in - (aggregated + r.cov_between) / (r.sigma_x_in * r.sigma_y_in);
  }
  return r;
}

SignConditionsReport sign_conditions(const Graph& g, const Partition& p, const Stratification& s,
                                     std::span<const double> x, PiMode mode) {
  if (!s.directed || !g.directed()) {
    throw Error(ErrorCode::InvalidArgument, "sign_conditions needs a directed stratification; use as_directed()");
  }
  if (p.node_count() != g.node_count()) throw Error(ErrorCode::PartitionSizeMismatch, "partition size mismatch");
  if (!(p == s.partition)) throw Error(ErrorCode::RoleMismatch, "stratification was built for another partition");
  if (x.size() != g.node_count()) throw Error(ErrorCode::InvalidArgument, "attribute size mismatch");

  SignConditionsReport r;
  r.mode = mode;
  const std::size_t k = p.block_count();

  std::vector<detail::PairSample> all;
  std::vector<std::vector<detail::PairSample>> per(k);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& e : s.entries) {
    if (e.stratum != Stratum::BI) continue;
    detail::PairSample ps{x[e.tail], x[e.head], sample_weight(mode, e.weight)};
    all.push_back(ps);
    per[p.block_of(e.tail)].push_back(ps);
    lo = std::min({lo, ps.x, ps.y});
    hi = std::max({hi, ps.x, ps.y});
  }
  if (all.empty()) throw Error(ErrorCode::NoBtoIArcs, "no B->I arcs");
  r.spread = hi - lo;
  const double strict_thr = kStrictScale * r.spread * r.spread;

  const auto glob = detail::pair_moments(all);
  r.mean_tail = glob.mean_x;
  r.mean_head = glob.mean_y;
  r.var_tail = glob.var_x;
  r.var_head = glob.var_y;

  std::vector<std::vector<double>> bdy(k), intr(k);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    (s.roles.interior(v) ? intr : bdy)[p.block_of(v)].push_back(x[v]);
  }

  double margin_i = INFINITY, margin_ii = INFINITY, margin_iv = INFINITY;
  bool any_i = false;
  for (BlockId b = 0; b < k; ++b) {
    GroupSignStats gs;
    gs.block = b;
    gs.interior = intr[b].size();
    gs.boundary = bdy[b].size();
    if (!bdy[b].empty()) gs.mu_boundary = detail::shifted_mean(bdy[b]);
    if (!intr[b].empty()) gs.mu_interior = detail::shifted_mean(intr[b]);
    if (gs.mu_boundary && gs.mu_interior) {
      any_i = true;
      margin_i = std::min(margin_i, *gs.mu_boundary - *gs.mu_interior);
    }
    if (!per[b].empty()) {
      if (!gs.mu_boundary || !gs.mu_interior) {
        throw Error(ErrorCode::MissingInteriorOrBoundary, "group " + std::to_string(b));
      }
      const auto m = detail::pair_moments(per[b]);
      gs.bi_count = m.count;
      gs.bi_weight = m.weight;
      gs.pi = m.weight / glob.weight;
      gs.mean_tail = m.mean_x;
      gs.mean_head = m.mean_y;
      gs.cov = m.cov;
      margin_ii = std::min({margin_ii, m.mean_x - *gs.mu_boundary, *gs.mu_interior - m.mean_y});
      margin_iv = std::min(margin_iv, -m.cov);
      r.strict_within |= -m.cov > strict_thr;
      r.cov_within += gs.pi * m.cov;
      r.between += gs.pi * (m.mean_x - glob.mean_x) * (m.mean_y - glob.mean_y);
    }
    r.groups.push_back(gs);
  }

  r.boundary_dominance = {any_i && margin_i > 0.0, any_i ? margin_i : 0.0};
  r.endpoint_mean_dominance = {margin_ii >= 0.0, margin_ii};
  const double thr_x = kZeroScale * glob.spread_x * glob.spread_x;
  const double thr_y = kZeroScale * glob.spread_y * glob.spread_y;
  r.nondegenerate = {glob.var_x > thr_x && glob.var_y > thr_y, std::min(glob.var_x - thr_x, glob.var_y - thr_y)};
  r.within_nonpositive = {margin_iv >= 0.0, margin_iv};
  r.between_nonpositive = {-r.between >= 0.0, -r.between};
  r.strict_between = -r.between > strict_thr;
  r.strictness = r.strict_within || r.strict_between;

  const bool all_hold = r.boundary_dominance.holds && r.endpoint_mean_dominance.holds && r.nondegenerate.holds &&
                        r.within_nonpositive.holds && r.between_nonpositive.holds;
  r.verdict = all_hold && r.strictness ? SignVerdict::NegativePredicted : SignVerdict::NotApplicable;

  r.observed = profile_scalar(s, x).at(Stratum::BI);
  if (auto c = correlation(glob)) {
    r.observed_sample = Coefficient::defined(*c);
  } else {
    r.observed_sample = Coefficient::undefined(UndefinedReason::ZeroVariance);
  }
  return r;
}

}  // namespace ibprof
