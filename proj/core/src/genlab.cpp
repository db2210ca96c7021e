#include "ibprof/genlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "ibprof/collapse.hpp"
#include "ibprof/error.hpp"
#include "ibprof/rng.hpp"

namespace ibprof {

std::string_view to_string(SBMModel m) noexcept {
  return m == SBMModel::Planted ? "planted" : "amplified";
}

void SBMSpec::validate() const {
  if (block_sizes.empty()) throw Error(ErrorCode::InvalidArgument, "sbm: no blocks");
  for (auto s : block_sizes)
    if (s == 0) throw Error(ErrorCode::InvalidArgument, "sbm: block sizes must be >= 1");
  if (!(p_within >= 0.0 && p_within <= 1.0)) throw Error(ErrorCode::InvalidArgument, "sbm: p outside [0,1]");
  if (!(q_between >= 0.0 && q_between <= 1.0)) throw Error(ErrorCode::InvalidArgument, "sbm: q outside [0,1]");
  if (!(weight > 0.0) || !std::isfinite(weight)) throw Error(ErrorCode::InvalidArgument, "sbm: weight must be > 0");
}

std::size_t SBMSpec::node_count() const {
  return std::accumulate(block_sizes.begin(), block_sizes.end(), std::size_t{0});
}

std::pair<Graph, Partition> sbm(const SBMSpec& spec) {
  spec.validate();
  const std::size_t n = spec.node_count();
  std::vector<BlockId> block(n);
  {
    std::size_t v = 0;
    for (BlockId b = 0; b < spec.block_sizes.size(); ++b)
      for (std::size_t i = 0; i < spec.block_sizes[b]; ++i) block[v++] = b;
  }
  const bool directed = spec.directedness == Directedness::Directed;
  Rng rng(spec.seed);
  std::vector<Arc> arcs;

  auto visit = [&](auto&& fn) {
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = directed ? 0 : u + 1; v < n; ++v) {
        if (u != v) fn(u, v);
      }
    }
  };

  if (spec.model == SBMModel::Planted) {
    visit([&](NodeId u, NodeId v) {
      const double prob = block[u] == block[v] ? spec.p_within : spec.q_between;
      if (rng.bernoulli(prob)) arcs.push_back({u, v, spec.weight});
    });
  } else {
    std::vector<char> gateway(n, 0);
    visit([&](NodeId u, NodeId v) {
      if (block[u] != block[v] && rng.bernoulli(spec.q_between)) {
        arcs.push_back({u, v, spec.weight});
        gateway[u] = gateway[v] = 1;
      }
    });
    const double boosted = std::min(1.0, 2.0 * spec.p_within);
    visit([&](NodeId u, NodeId v) {
      if (block[u] != block[v]) return;
      const bool boost = directed ? gateway[v] != 0 : (gateway[u] || gateway[v]);
      if (rng.bernoulli(boost ? boosted : spec.p_within)) arcs.push_back({u, v, spec.weight});
    });
  }
  return {Graph::build(n, arcs, spec.directedness), Partition::from_labels(std::move(block))};
}

namespace {

Partition halves(std::size_t n) {
  std::vector<BlockId> labels(n, 0);
  for (std::size_t v = n / 2; v < n; ++v) labels[v] = 1;
  return Partition::from_labels(std::move(labels));
}

const std::vector<Arc>& bridge_edges() {
  static const std::vector<Arc> e{{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {3, 4, 1}, {3, 5, 1}, {4, 5, 1}, {2, 3, 1}};
  return e;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Instance two_triangle_bridge() {
  return {"two_triangle_bridge", Graph::build(6, bridge_edges(), Directedness::Undirected),
          Partition::from_blocks(6, {{0, 1, 2}, {3, 4, 5}}), std::nullopt, std::nullopt};
}

Instance two_triangle_bridge_directed() {
  std::vector<Arc> arcs{{0, 1, 1}, {1, 2, 1}, {2, 0, 1}, {3, 4, 1}, {4, 5, 1}, {5, 3, 1}, {2, 3, 1}};
  return {"two_triangle_bridge_directed", Graph::build(6, arcs, Directedness::Directed),
          Partition::from_blocks(6, {{0, 1, 2}, {3, 4, 5}}), std::nullopt, std::nullopt};
}

Instance dir_cycle(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "dir_cycle needs n >= 2");
  std::vector<Arc> arcs;
  for (NodeId v = 0; v < n; ++v) arcs.push_back({v, static_cast<NodeId>((v + 1) % n), 1.0});
  return {"dir_cycle(" + std::to_string(n) + ")", Graph::build(n, arcs, Directedness::Directed), halves(n),
          std::nullopt, std::nullopt};
}

Instance k22() {
  std::vector<Arc> edges{{0, 2, 1}, {0, 3, 1}, {1, 2, 1}, {1, 3, 1}};
  return {"k22", Graph::build(4, edges, Directedness::Undirected), Partition::from_blocks(4, {{0, 1}, {2, 3}}),
          std::vector<double>{0, 0, 1, 1}, std::nullopt};
}

Instance regular(std::size_t n, std::size_t d) {
  if (n < 2 || d == 0 || d >= n || (d % 2 == 1 && n % 2 == 1)) {
    throw Error(ErrorCode::InvalidArgument, "regular(n,d) needs 0 < d < n and n*d even");
  }
  // Circulant: offsets 1..d/2, plus the antipode when d is odd.
  std::vector<Arc> edges;
  for (NodeId v = 0; v < n; ++v) {
    for (std::size_t s = 1; s <= d / 2; ++s) edges.push_back({v, static_cast<NodeId>((v + s) % n), 1.0});
    if (d % 2 == 1 && v < n / 2) edges.push_back({v, static_cast<NodeId>(v + n / 2), 1.0});
  }
  Graph g = Graph::build(n, edges, Directedness::Undirected);
  auto st = g.strengths();
  for (double k : st.out_strength) {
    if (k != static_cast<double>(d)) throw Error(ErrorCode::InvalidArgument, "regular(n,d): circulant is not d-regular");
  }
  return {"regular(" + std::to_string(n) + "," + std::to_string(d) + ")", std::move(g), halves(n), std::nullopt,
          std::nullopt};
}

Instance amplified(double p, double q, std::vector<std::size_t> sizes, std::uint64_t seed) {
  SBMSpec spec;
  spec.block_sizes = sizes;
  spec.p_within = p;
  spec.q_between = q;
  spec.seed = seed;
  spec.model = SBMModel::Amplified;
  auto [g, part] = sbm(spec);

  // Boundary-amplified attribute: constant per (block, role), boundary above interior.
  const auto roles = classify_roles(g, part);
  const double k = static_cast<double>(part.block_count());
  std::vector<double> x(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const double b = static_cast<double>(part.block_of(v));
    x[v] = roles.interior(v) ? 1.0 - b / k : 2.0 + b / k;
  }

  std::string name = "amplified(" + fmt_double(p) + "," + fmt_double(q) + ",";
  for (std::size_t i = 0; i < sizes.size(); ++i) name += (i ? "x" : "") + std::to_string(sizes[i]);
  name += "," + std::to_string(seed) + ")";

  const auto strat = stratify_arcs(g, part, roles);
  std::vector<char> has_bi(part.block_count(), 0);
  for (const auto& e : strat.entries)
    if (e.stratum == Stratum::BI) has_bi[part.block_of(e.tail)] = 1;
  if (std::count(has_bi.begin(), has_bi.end(), 1) < 2) {
    throw Error(ErrorCode::InvalidArgument, name + ": fewer than two blocks carry B->I arcs; no sign witness");
  }
  const auto report = sign_conditions(g, part, strat, x);
  if (report.verdict != SignVerdict::NegativePredicted || !report.observed.has_value() || !(*report.observed.value < 0)) {
    throw Error(ErrorCode::Internal, name + ": sign witness failed");
  }
  return {name, std::move(g), std::move(part), std::move(x), std::nullopt};
}

namespace {

struct Fraction {
  std::int64_t num;
  std::int64_t den;
  auto operator<=>(const Fraction&) const = default;
};

}  // namespace

Instance corollary_pair() {
  Instance base = two_triangle_bridge();
  const auto strat = stratify_arcs(base.graph, base.partition);
  constexpr std::size_t kValues = 4, kNodes = 6;
  std::size_t total = 1;
  for (std::size_t i = 0; i < kNodes; ++i) total *= kValues;

  auto decode = [&](std::size_t idx) {
    std::vector<double> x(kNodes);
    for (std::size_t v = 0; v < kNodes; ++v, idx /= kValues) x[v] = static_cast<double>(idx % kValues);
    return x;
  };
  // Exact r_in over the pooled II + IB sample as a reduced fraction.
  auto r_in_key = [&](const std::vector<double>& x) -> std::optional<Fraction> {
    std::int64_t n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (const auto& e : strat.entries) {
      if (e.stratum == Stratum::BB) continue;
      const auto a = static_cast<std::int64_t>(x[e.tail]), b = static_cast<std::int64_t>(x[e.head]);
      ++n;
      sx += a;
      sy += b;
      sxx += a * a;
      syy += b * b;
      sxy += a * b;
    }
    const std::int64_t num = n * sxy - sx * sy;
    const std::int64_t vx = n * sxx - sx * sx, vy = n * syy - sy * sy;
    // The arc view is symmetric, so vx == vy and r = num / vx.
    if (vx <= 0 || vx != vy) return std::nullopt;
    const std::int64_t g = std::gcd(num < 0 ? -num : num, vx);
    return Fraction{num / g, vx / g};
  };

  std::vector<AssortProfile> profiles(total);
  std::map<Fraction, std::vector<std::size_t>> buckets;
  std::optional<std::pair<std::size_t, std::size_t>> found;
  for (std::size_t b = 0; b < total && !found; ++b) {
    const auto x = decode(b);
    profiles[b] = profile_scalar(strat, x);
    const auto key = r_in_key(x);
    if (!key) continue;
    auto& bucket = buckets[*key];
    for (std::size_t a : bucket) {
      bool same_pattern = true;
      double diff = 0.0;
      for (std::size_t t = 0; t < profiles[b].entries.size(); ++t) {
        const auto& ra = profiles[a].entries[t].rho;
        const auto& rb = profiles[b].entries[t].rho;
        same_pattern &= ra.has_value() == rb.has_value();
        if (ra.has_value() && rb.has_value()) diff = std::max(diff, std::abs(*ra.value - *rb.value));
      }
      if (same_pattern && diff > 0.1) {
        found = std::make_pair(a, b);
        break;
      }
    }
    bucket.push_back(b);
  }
  if (!found) throw Error(ErrorCode::Internal, "corollary_pair: grid search found no witness");

  auto xa = decode(found->first), xb = decode(found->second);
  const auto ca = collapse_decomposition(strat, xa), cb = collapse_decomposition(strat, xb);
  if (!ca.r_in || !cb.r_in || std::abs(*ca.r_in - *cb.r_in) >= 1e-10) {
    throw Error(ErrorCode::Internal, "corollary_pair: r_in mismatch");
  }
  base.name = "corollary_pair";
  base.attribute = std::move(xa);
  base.attribute_b = std::move(xb);
  return base;
}

namespace {

std::vector<std::string> split_args(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

template <class T, class F>
T parse_number(const std::string& s, std::string_view name, F convert) {
  try {
    std::size_t pos = 0;
    T v = convert(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::UnknownFixture, "bad argument '" + s + "' in fixture " + std::string(name));
  }
}

std::size_t as_count(const std::string& s, std::string_view name) {
  if (!s.empty() && s[0] == '-') throw Error(ErrorCode::UnknownFixture, "negative count in fixture " + std::string(name));
  return parse_number<std::size_t>(s, name, [](const std::string& t, std::size_t* p) { return std::stoull(t, p); });
}

double as_real(const std::string& s, std::string_view name) {
  return parse_number<double>(s, name, [](const std::string& t, std::size_t* p) { return std::stod(t, p); });
}

}  // namespace

Instance fixture(std::string_view name) {
  const auto open = name.find('(');
  const std::string head(name.substr(0, open));
  std::vector<std::string> args;
  if (open != std::string_view::npos) {
    if (name.back() != ')') throw Error(ErrorCode::UnknownFixture, "malformed fixture name: " + std::string(name));
    args = split_args(name.substr(open + 1, name.size() - open - 2));
  }
  auto expect = [&](std::size_t count) {
    if (args.size() != count) {
      throw Error(ErrorCode::UnknownFixture, head + " takes " + std::to_string(count) + " argument(s)");
    }
  };
  if (head == "two_triangle_bridge") {
    expect(0);
    return two_triangle_bridge();
  }
  if (head == "two_triangle_bridge_directed") {
    expect(0);
    return two_triangle_bridge_directed();
  }
  if (head == "k22") {
    expect(0);
    return k22();
  }
  if (head == "corollary_pair") {
    expect(0);
    return corollary_pair();
  }
  if (head == "dir_cycle") {
    expect(1);
    return dir_cycle(as_count(args[0], name));
  }
  if (head == "regular") {
    expect(2);
    return regular(as_count(args[0], name), as_count(args[1], name));
  }
  if (head == "amplified") {
    expect(4);
    std::vector<std::size_t> sizes;
    std::string part;
    for (char c : args[2] + "x") {
      if (c == 'x') {
        sizes.push_back(as_count(part, name));
        part.clear();
      } else {
        part.push_back(c);
      }
    }
    return amplified(as_real(args[0], name), as_real(args[1], name), sizes,
                     parse_number<std::uint64_t>(args[3], name,
                                                 [](const std::string& t, std::size_t* p) { return std::stoull(t, p); }));
  }
  throw Error(ErrorCode::UnknownFixture, "unknown fixture: " + std::string(name));
}

SweepResult chain_sweep(const SBMSpec& base, std::span<const double> q_values, const SISParams& params,
                        std::size_t replicates, std::size_t jobs) {
  base.validate();
  params.validate();
  std::vector<double> qs(q_values.begin(), q_values.end());
  std::stable_sort(qs.begin(), qs.end());

  SweepResult out;
  out.base = base;
  out.params = params;
  const std::size_t tasks = qs.size() * replicates;
  out.records.resize(tasks);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      try {
        const std::size_t qi = t / replicates, rep = t % replicates;
        SBMSpec spec = base;
        spec.q_between = qs[qi];
        spec.seed = derive_seed(base.seed, qi, rep);
        auto [g, part] = sbm(spec);
        const auto chain = implication_chain(g, part, params);
        SweepRecord& r = out.records[t];
        r.q_between = qs[qi];
        r.replicate = rep;
        r.seed = spec.seed;
        r.phi_max = chain.phi_max;
        r.min_gap = chain.min_gap;
        r.dominance_all = chain.dominance_all;
        r.r_bi = chain.r_bi;
        r.negative = chain.r_bi.has_value() && *chain.r_bi.value < 0.0;
        r.prediction = chain.prediction;
        r.verdict = chain.verdict;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, tasks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    SweepSummary s;
    s.q_between = qs[qi];
    s.replicates = replicates;
    std::size_t dom = 0, neg = 0, both = 0, prem = 0;
    for (std::size_t rep = 0; rep < replicates; ++rep) {
      const auto& r = out.records[qi * replicates + rep];
      dom += r.dominance_all;
      neg += r.negative;
      both += r.dominance_all && r.negative;
      prem += r.verdict == ChainVerdict::NegativePredicted || r.verdict == ChainVerdict::ConditionsFail;
    }
    const double denom = replicates ? static_cast<double>(replicates) : 1.0;
    s.dominance_fraction = static_cast<double>(dom) / denom;
    s.negative_fraction = static_cast<double>(neg) / denom;
    s.both_fraction = static_cast<double>(both) / denom;
    s.premises_fraction = static_cast<double>(prem) / denom;
    out.summary.push_back(s);
  }
  return out;
}

}  // namespace ibprof
