#include "ibprof/sis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ibprof/error.hpp"
#include "moments.hpp"

namespace ibprof {

void SISParams::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::InvalidArgument, "beta must be positive");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
}

std::string_view to_string(EquilibriumMethod m) noexcept {
  return m == EquilibriumMethod::FixedPoint ? "fixed_point" : "ode_limit";
}

std::string_view to_string(DominanceSkip s) noexcept {
  switch (s) {
    case DominanceSkip::None:
      return "none";
    case DominanceSkip::EmptyInterior:
      return "empty_interior";
    case DominanceSkip::EmptyBoundary:
      return "empty_boundary";
  }
  return "unknown";
}

std::string_view to_string(ChainVerdict v) noexcept {
  switch (v) {
    case ChainVerdict::DiseaseFree:
      return "disease_free";
    case ChainVerdict::NoBtoIArcs:
      return "no_b_to_i_arcs";
    case ChainVerdict::NoDominance:
      return "no_dominance";
    case ChainVerdict::ConditionsFail:
      return "conditions_fail";
    case ChainVerdict::NegativePredicted:
      return "negative_predicted";
  }
  return "unknown";
}

namespace {

// s_i = sum_j A_ji x_j, over the arcs entering i.
void infection_pressure(const Graph& g, std::span<const double> x, std::vector<double>& s) {
  s.assign(g.node_count(), 0.0);
  for (NodeId i = 0; i < g.node_count(); ++i) {
    double acc = 0.0;
    for (const Arc& a : g.in_entries(i)) acc += a.weight * x[a.tail];
    s[i] = acc;
  }
}

void rhs_into(const Graph& g, const SISParams& p, std::span<const double> x, std::vector<double>& s,
              std::vector<double>& out) {
  infection_pressure(g, x, s);
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = -p.delta * x[i] + (1.0 - x[i]) * p.beta * s[i];
}

// F_i(x) = 1 - delta / (delta + beta s_i): monotone under rounding.
void fixed_point_map(const Graph& g, const SISParams& p, std::span<const double> x, std::vector<double>& s,
                     std::vector<double>& out) {
  infection_pressure(g, x, s);
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = 1.0 - p.delta / (p.delta + p.beta * s[i]);
}

void check_state(std::span<const double> x, std::size_t n, double slack) {
  if (x.size() != n) throw Error(ErrorCode::InvalidArgument, "state size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] >= -slack && x[i] <= 1.0 + slack)) {
      throw Error(ErrorCode::StateOutOfRange, "x[" + std::to_string(i) + "] = " + std::to_string(x[i]));
    }
  }
}

double inf_norm_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void fill_residuals(const Graph& g, const SISParams& p, EquilibriumResult& r) {
  std::vector<double> s, f;
  fixed_point_map(g, p, r.x_star, s, f);
  r.residual = inf_norm_diff(f, r.x_star);
  rhs_into(g, p, r.x_star, s, f);
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  r.rhs_residual = m;
}

class Rk4 {
 public:
  Rk4(const Graph& g, const SISParams& p, double dt) : g_(g), p_(p), dt_(dt) {}

  // Advances x by h; returns the derivative at the start of the step.
  const std::vector<double>& step(std::vector<double>& x, double h) {
    const std::size_t n = x.size();
    rhs_into(g_, p_, x, s_, k1_);
    tmp_.resize(n);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * h * k1_[i];
    rhs_into(g_, p_, tmp_, s_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * h * k2_[i];
    rhs_into(g_, p_, tmp_, s_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h * k3_[i];
    rhs_into(g_, p_, tmp_, s_, k4_);
    for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(x[i] >= -kInvarianceSlack && x[i] <= 1.0 + kInvarianceSlack)) {
        throw Error(ErrorCode::InvarianceViolation, "state left [0,1] at node " + std::to_string(i) +
                                                        " (x=" + std::to_string(x[i]) + ", dt=" + std::to_string(h) +
                                                        "); reduce dt");
      }
    }
    return k1_;
  }

  double dt() const { return dt_; }

 private:
  const Graph& g_;
  const SISParams& p_;
  double dt_;
  std::vector<double> s_, k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace

std::vector<double> sis_rhs(std::span<const double> x, const SISParams& params, const Graph& g) {
  params.validate();
  check_state(x, g.node_count(), kInvarianceSlack);
  std::vector<double> s, out;
  rhs_into(g, params, x, s, out);
  return out;
}

double default_dt(const Graph& g, const SISParams& params) {
  auto st = g.strengths();
  double kmax = 0.0;
  for (double k : st.in_strength) kmax = std::max(kmax, k);
  return 0.01 / (params.delta + params.beta * kmax);
}

Trajectory integrate(std::span<const double> x0, const SISParams& params, const Graph& g,
                     const IntegrateOptions& options) {
  params.validate();
  check_state(x0, g.node_count(), 0.0);
  if (!(options.horizon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be nonnegative");
  const double dt = options.dt > 0.0 ? options.dt : default_dt(g, params);

  Trajectory tr;
  std::vector<double> x(x0.begin(), x0.end());
  tr.times.push_back(0.0);
  tr.states.push_back(x);
  const auto steps = static_cast<std::size_t>(std::ceil(options.horizon / dt - 1e-12));
  Rk4 rk(g, params, dt);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t0 = static_cast<double>(k - 1) * dt;
    const double h = std::min(dt, options.horizon - t0);
    rk.step(x, h);
    const bool last = k == steps;
    if (last || (options.sample_every > 0 && k % options.sample_every == 0)) {
      tr.times.push_back(last ? options.horizon : static_cast<double>(k) * dt);
      tr.states.push_back(x);
    }
  }
  tr.steps = steps;
  return tr;
}

EquilibriumResult endemic_equilibrium(const Graph& g, const SISParams& params, const EquilibriumOptions& options) {
  params.validate();
  const std::size_t n = g.node_count();
  EquilibriumResult r;
  r.method = EquilibriumMethod::FixedPoint;
  r.spectral_radius = g.arcs().empty() ? 0.0 : spectral_radius(g).value;
  r.threshold_margin = params.beta * r.spectral_radius / params.delta - 1.0;
  if (r.threshold_margin <= 0.0) {
    r.x_star.assign(n, 0.0);
    fill_residuals(g, params, r);
    return r;
  }

  std::vector<double> x(n), f, s;
  switch (options.start) {
    case FixedPointStart::Half:
      std::fill(x.begin(), x.end(), 0.5);
      break;
    case FixedPointStart::Ones:
      std::fill(x.begin(), x.end(), 1.0);
      break;
    case FixedPointStart::Subsolution: {
      // eps * v with A^T v = rho v satisfies F(x) >= x for small eps.
      const auto v = perron_vector(g, true);
      const double vmax = *std::max_element(v.begin(), v.end());
      double eps = 0.5 * r.threshold_margin / ((r.threshold_margin + 1.0) * vmax);
      bool ok = false;
      for (int attempt = 0; attempt < 200 && !ok; ++attempt, eps *= 0.5) {
        for (std::size_t i = 0; i < n; ++i) x[i] = eps * v[i];
        fixed_point_map(g, params, x, s, f);
        ok = true;
        for (std::size_t i = 0; i < n; ++i) ok &= f[i] >= x[i];
      }
      if (!ok) throw Error(ErrorCode::Internal, "no sub-solution start found");
      break;
    }
  }

  bool nondecreasing = true, nonincreasing = true;
  double damping = 1.0, prev_norm = INFINITY;
  std::vector<double> prev_step(n, 0.0);
  if (options.record_iterates) r.iterates.push_back(x);
  while (true) {
    fixed_point_map(g, params, x, s, f);
    double norm = 0.0;
    bool flipped = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = f[i] - x[i];
      norm = std::max(norm, std::abs(d));
      flipped |= d * prev_step[i] < 0.0;
      prev_step[i] = d;
    }
    if (norm <= options.tol) break;
    if (r.iterations >= options.max_iterations) {
      throw Error(ErrorCode::NonConvergence,
                  "endemic_equilibrium: step " + std::to_string(norm) + " after " + std::to_string(r.iterations) +
                      " iterations");
    }
    if (flipped && norm >= prev_norm) damping *= 0.5;
    prev_norm = norm;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = damping == 1.0 ? f[i] : x[i] + damping * (f[i] - x[i]);
      nondecreasing &= next >= x[i];
      nonincreasing &= next <= x[i];
      x[i] = next;
    }
    ++r.iterations;
    if (options.record_iterates) r.iterates.push_back(x);
  }
  r.x_star = std::move(x);
  r.monotone = nondecreasing || nonincreasing;
  r.nondecreasing = nondecreasing;
  r.final_damping = damping;
  fill_residuals(g, params, r);
  return r;
}

EquilibriumResult ode_equilibrium(const Graph& g, const SISParams& params, std::span<const double> x0,
                                  const OdeEquilibriumOptions& options) {
  params.validate();
  check_state(x0, g.node_count(), 0.0);
  EquilibriumResult r;
  r.method = EquilibriumMethod::OdeLimit;
  r.spectral_radius = g.arcs().empty() ? 0.0 : spectral_radius(g).value;
  r.threshold_margin = params.beta * r.spectral_radius / params.delta - 1.0;

  const double dt = options.dt > 0.0 ? options.dt : default_dt(g, params);
  std::vector<double> x(x0.begin(), x0.end());
  Rk4 rk(g, params, dt);
  const auto max_steps = static_cast<std::size_t>(options.max_time / dt);
  bool converged = false;
  for (std::size_t k = 0; k < max_steps; ++k) {
    std::vector<double> before = x;
    const auto& deriv = rk.step(x, dt);
    double m = 0.0;
    for (double d : deriv) m = std::max(m, std::abs(d));
    ++r.iterations;
    if (m <= options.tol) {
      x = std::move(before);
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(ErrorCode::NonConvergence, "ode_equilibrium: derivative did not vanish");
  r.x_star = std::move(x);
  fill_residuals(g, params, r);
  return r;
}

std::vector<GroupDominance> boundary_dominance(const Graph& g, const Partition& p, const NodeRoles& roles,
                                               std::span<const double> x_star) {
  if (p.node_count() != g.node_count() || roles.role_of.size() != g.node_count()) {
    throw Error(ErrorCode::PartitionSizeMismatch, "partition or roles size mismatch");
  }
  if (x_star.size() != g.node_count()) throw Error(ErrorCode::InvalidArgument, "x_star size mismatch");
  std::vector<std::vector<double>> bdy(p.block_count()), intr(p.block_count());
  for (NodeId v = 0; v < g.node_count(); ++v) (roles.interior(v) ? intr : bdy)[p.block_of(v)].push_back(x_star[v]);

  std::vector<GroupDominance> out;
  for (BlockId b = 0; b < p.block_count(); ++b) {
    GroupDominance d;
    d.block = b;
    if (!bdy[b].empty()) d.mean_boundary = detail::shifted_mean(bdy[b]);
    if (!intr[b].empty()) d.mean_interior = detail::shifted_mean(intr[b]);
    if (intr[b].empty()) {
      d.skipped = DominanceSkip::EmptyInterior;
    } else if (bdy[b].empty()) {
      d.skipped = DominanceSkip::EmptyBoundary;
    } else {
      d.gap = *d.mean_boundary - *d.mean_interior;
      d.dominant = *d.gap > 0.0;
    }
    out.push_back(d);
  }
  return out;
}

ChainReport implication_chain(const Graph& g_in, const Partition& p, const SISParams& params,
                              const ChainOptions& options) {
  params.validate();
  const Graph g = g_in.as_directed();
  if (p.node_count() != g.node_count()) throw Error(ErrorCode::PartitionSizeMismatch, "partition size mismatch");

  ChainReport r;
  if (!g_in.directed()) r.notes.emplace_back("undirected input treated as a symmetric digraph");
  r.walk = options.walk.value_or(WalkSpec::automatic(g));
  const auto pm = transition_matrix(g, r.walk);
  const auto st = stationary(pm);
  if (!st.converged) {
    throw Error(ErrorCode::NonConvergence,
                "stationary distribution did not converge (residual " + std::to_string(st.residual) + ")");
  }
  r.phi_per_block = block_conductances(st.phi, pm, p);
  for (const auto& b : r.phi_per_block)
    if (b.phi) r.phi_max = std::max(r.phi_max.value_or(-INFINITY), *b.phi);

  r.equilibrium = endemic_equilibrium(g, params, options.equilibrium);
  const auto& x = r.equilibrium.x_star;

  const auto roles = classify_roles(g, p);
  const auto strat = stratify_arcs(g, p, roles);
  r.profile = profile_scalar(strat, x);
  r.r_bi = r.profile.at(Stratum::BI);
  r.dominance = boundary_dominance(g, p, roles, x);
  bool any = false, all = true;
  for (const auto& d : r.dominance) {
    if (!d.gap) continue;
    any = true;
    all &= d.dominant;
    r.min_gap = std::min(r.min_gap.value_or(INFINITY), *d.gap);
  }
  r.dominance_all = any && all;

  if (r.equilibrium.threshold_margin <= 0.0) {
    r.verdict = ChainVerdict::DiseaseFree;
    r.notes.emplace_back("below epidemic threshold: x* = 0");
    return r;
  }
  if (strat.count[static_cast<std::size_t>(Stratum::BI)] == 0) {
    r.verdict = ChainVerdict::NoBtoIArcs;
    r.notes.emplace_back("no B->I arcs: the B->I component is undefined");
    return r;
  }

  r.premises_hold = r.dominance_all;
  if (!any) r.notes.emplace_back("premises fail: no group has both interior and boundary nodes");
  else if (!all) r.notes.emplace_back("premises fail: boundary dominance does not hold in every group");
  if (options.phi_threshold && !(r.phi_max && *r.phi_max <= *options.phi_threshold)) {
    r.premises_hold = false;
    r.notes.emplace_back("premises fail: Phi_max above the requested threshold");
  }

  r.sign_report = sign_conditions(g, p, strat, x);
  r.prediction = r.sign_report->verdict == SignVerdict::NegativePredicted;
  r.conclusion_holds = r.r_bi.has_value() && *r.r_bi.value < 0.0;
  if (!r.premises_hold) {
    r.verdict = ChainVerdict::NoDominance;
  } else if (r.prediction) {
    r.verdict = ChainVerdict::NegativePredicted;
  } else {
    r.verdict = ChainVerdict::ConditionsFail;
    r.notes.emplace_back("sign conditions (i)-(v) with strictness do not all hold on x*");
  }
  return r;
}

}  // namespace ibprof
