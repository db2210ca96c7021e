#include <gtest/gtest.h>

#include <random>

#include "support/helpers.hpp"

using namespace ibprof;
using testing_support::build;
using testing_support::expect_code;

namespace {

// Mixing-matrix coefficient from a labelled pair list.
std::optional<double> mixing_oracle(const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& arcs,
                                    std::size_t k) {
  std::vector<std::vector<double>> e(k, std::vector<double>(k, 0));
  double total = 0;
  for (auto [p, q, w] : arcs) {
    e[p][q] += w;
    total += w;
  }
  if (total <= 0) return std::nullopt;
  double tr = 0, ab = 0;
  for (std::size_t p = 0; p < k; ++p) {
    double a = 0, b = 0;
    for (std::size_t q = 0; q < k; ++q) {
      a += e[p][q] / total;
      b += e[q][p] / total;
    }
    tr += e[p][p] / total;
    ab += a * b;
  }
  if (1 - ab <= 1e-14) return std::nullopt;
  return (tr - ab) / (1 - ab);
}

int oracle_stratum(const std::vector<bool>& in, std::size_t i, std::size_t j, bool directed) {
  int t = oracle::stratum(in, i, j);
  return !directed && t == 2 ? 1 : t;
}

}  // namespace

TEST(RhoScalar, ConstantAttributeUndefined) {
  auto inst = two_triangle_bridge();
  auto c = rho_scalar(inst.graph, std::vector<double>(6, 3.5));
  EXPECT_FALSE(c.has_value());
  EXPECT_EQ(c.reason, UndefinedReason::ZeroVariance);
}

TEST(RhoScalar, K22SideIndicator) {
  auto inst = k22();
  EXPECT_NEAR(*rho_scalar(inst.graph, *inst.attribute).value, -1.0, 1e-12);
}

TEST(RhoScalar, DirectedCycleMatchesPairList) {
  auto g = dir_cycle(4).graph;
  std::vector<double> x{1, 2, 3, 4};
  std::vector<oracle::Pair> pairs{{1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {4, 1, 1}};
  EXPECT_NEAR(*rho_scalar(g, x).value, *oracle::pearson(pairs), 1e-12);
  EXPECT_NEAR(*rho_scalar_pearson(g, x).value, *oracle::pearson(pairs), 1e-12);
}

TEST(RhoScalar, EmptyGraph) {
  expect_code(ErrorCode::EmptyGraph, [] { rho_scalar(build(3, {}, true), std::vector<double>{1, 2, 3}); });
}

TEST(RhoScalar, MatchesOracleAndAffineInvariant) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 200; ++t) {
    auto r = testing_support::random_instance(rng);
    auto want = oracle::pearson(oracle::adjacency_pairs(testing_support::dense_of(r), r.x));
    auto got = rho_scalar(r.graph, r.x);
    ASSERT_EQ(got.has_value(), want.has_value()) << t;
    if (!want) continue;
    EXPECT_NEAR(*got.value, *want, 1e-10);
    EXPECT_GE(*got.value, -1.0 - 1e-12);
    EXPECT_LE(*got.value, 1.0 + 1e-12);
    std::vector<double> y(r.n);
    for (std::size_t v = 0; v < r.n; ++v) y[v] = -3.0 * r.x[v] + 17.0;
    EXPECT_NEAR(*rho_scalar(r.graph, y).value, *got.value, 1e-10);
  }
}

TEST(RhoScalar, SelfLoopsCountAsOrdinaryArcs) {
  // A self-loop adds the pair (x_v, x_v); pinned against the pair-list oracle.
  auto g = build(3, {{0, 1, 1}, {1, 2, 1}, {2, 2, 1}}, true);
  std::vector<double> x{0, 1, 5};
  std::vector<oracle::Pair> pairs{{0, 1, 1}, {1, 5, 1}, {5, 5, 1}};
  EXPECT_NEAR(*rho_scalar(g, x).value, *oracle::pearson(pairs), 1e-12);
}

TEST(RhoCategorical, Examples) {
  auto inst = two_triangle_bridge();
  // All arcs within label classes.
  auto within = build(4, {{0, 1, 1}, {2, 3, 1}}, false);
  EXPECT_NEAR(*rho_categorical(within, std::vector<BlockId>{0, 0, 1, 1}).rho.value, 1.0, 1e-15);
  auto kk = k22();
  auto res = rho_categorical(kk.graph, std::vector<BlockId>{0, 0, 1, 1});
  EXPECT_NEAR(*res.rho.value, -1.0, 1e-12);
  EXPECT_NEAR(res.mixing.e.sum(), 1.0, 1e-12);
  auto single = rho_categorical(inst.graph, std::vector<BlockId>(6, 0));
  EXPECT_FALSE(single.rho.has_value());
  EXPECT_EQ(single.rho.reason, UndefinedReason::ZeroDenominator);
}

TEST(RhoCategorical, MixingMarginals) {
  std::mt19937_64 rng(52);
  for (int t = 0; t < 50; ++t) {
    auto r = testing_support::random_instance(rng);
    auto res = rho_categorical(r.graph, r.partition.labels());
    EXPECT_NEAR(res.mixing.a.sum(), 1.0, 1e-12);
    EXPECT_NEAR(res.mixing.b.sum(), 1.0, 1e-12);
    for (Eigen::Index p = 0; p < res.mixing.e.rows(); ++p) {
      EXPECT_NEAR(res.mixing.a(p), res.mixing.e.row(p).sum(), 1e-12);
      EXPECT_NEAR(res.mixing.b(p), res.mixing.e.col(p).sum(), 1e-12);
    }
  }
}

TEST(Modularity, SingleBlockZero) {
  auto inst = two_triangle_bridge_directed();
  EXPECT_NEAR(directed_modularity(inst.graph, Partition::single_block(6)), 0.0, 1e-15);
}

TEST(Modularity, K22) {
  auto inst = k22();
  EXPECT_NEAR(directed_modularity(inst.graph, inst.partition), -0.5, 1e-15);
}

TEST(Modularity, MatchesDoubleLoop) {
  auto inst = two_triangle_bridge_directed();
  std::vector<oracle::RawEdge> e;
  for (const auto& a : inst.graph.arcs()) e.push_back({a.tail, a.head, a.weight});
  auto a = oracle::adjacency(6, e, true);
  std::vector<std::uint32_t> block{0, 0, 0, 1, 1, 1};
  for (double gamma : {0.5, 1.0, 2.0})
    EXPECT_NEAR(directed_modularity(inst.graph, inst.partition, gamma), oracle::modularity(a, block, gamma), 1e-12);
}

TEST(Modularity, RandomMatchesOracle) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 100; ++t) {
    auto r = testing_support::random_instance(rng);
    EXPECT_NEAR(directed_modularity(r.graph, r.partition), oracle::modularity(testing_support::dense_of(r), r.block, 1.0),
                1e-12);
  }
}

TEST(ModularityConsistency, K22) {
  auto inst = k22();
  auto c = rho_modularity_consistency(inst.graph, inst.partition);
  EXPECT_NEAR(c.rho, -1.0, 1e-12);
  EXPECT_NEAR(c.q, -0.5, 1e-12);
  EXPECT_NEAR(c.denom, 0.5, 1e-12);
}

TEST(ModularityConsistency, SingleBlockZeroDenominator) {
  auto inst = two_triangle_bridge();
  expect_code(ErrorCode::ZeroDenominator,
              [&] { rho_modularity_consistency(inst.graph, Partition::single_block(6)); });
}

TEST(ModularityConsistency, RandomDirectedSbm) {
  SBMSpec spec;
  spec.block_sizes = {10, 10};
  spec.p_within = 0.4;
  spec.q_between = 0.1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    spec.seed = seed;
    auto [g, p] = sbm(spec);
    auto c = rho_modularity_consistency(g, p);
    std::vector<oracle::RawEdge> e;
    for (const auto& a : g.arcs()) e.push_back({a.tail, a.head, a.weight});
    std::vector<std::uint32_t> block(p.labels().begin(), p.labels().end());
    const double q = oracle::modularity(oracle::adjacency(20, e, true), block, 1.0);
    EXPECT_NEAR(c.q, q, 1e-12);
    EXPECT_NEAR(c.rho, q / c.denom, 1e-10);
  }
}

TEST(Profile, SingleArcStratumUndefined) {
  auto inst = two_triangle_bridge_directed();
  auto s = stratify_arcs(inst.graph, inst.partition);
  auto prof = profile_scalar(s, std::vector<double>{1, 2, 3, 4, 5, 6});
  // B->B holds only the bridge arc.
  EXPECT_EQ(prof.at(Stratum::BB).reason, UndefinedReason::ZeroVariance);
}

TEST(Profile, K22CollapsesToBB) {
  auto inst = k22();
  auto s = stratify_arcs(inst.graph, inst.partition);
  std::vector<double> x{0.5, 1.5, 4, 7};
  auto prof = profile_scalar(s, x);
  EXPECT_EQ(prof.at(Stratum::II).reason, UndefinedReason::EmptyStratum);
  EXPECT_EQ(prof.at(Stratum::IB).reason, UndefinedReason::EmptyStratum);
  EXPECT_DOUBLE_EQ(*prof.at(Stratum::BB).value, *rho_scalar(inst.graph, x).value);
}

TEST(Profile, TwoTriangleBridgeDegreeAttribute) {
  auto inst = two_triangle_bridge();
  auto s = stratify_arcs(inst.graph, inst.partition);
  auto x = inst.graph.strengths().out_strength;
  auto prof = profile_scalar(s, x);
  std::vector<oracle::RawEdge> e;
  for (const auto& a : inst.graph.arcs()) e.push_back({a.tail, a.head, a.weight});
  auto a = oracle::adjacency(6, e, false);
  auto in = oracle::interior(a, {0, 0, 0, 1, 1, 1});
  for (Stratum t : s.strata()) {
    std::vector<oracle::Pair> pairs;
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        if (a[i][j] > 0 && oracle_stratum(in, i, j, false) == int(t)) pairs.push_back({x[i], x[j], a[i][j]});
    auto want = oracle::pearson(pairs);
    ASSERT_EQ(prof.at(t).has_value(), want.has_value()) << stratum_name(t, false);
    if (want) EXPECT_NEAR(*prof.at(t).value, *want, 1e-12);
  }
}

TEST(Profile, RandomMatchesStratumRestrictedOracle) {
  std::mt19937_64 rng(54);
  for (int k = 0; k < 150; ++k) {
    auto r = testing_support::random_instance(rng);
    auto a = testing_support::dense_of(r);
    auto in = oracle::interior(a, r.block);
    auto s = stratify_arcs(r.graph, r.partition);
    auto prof = profile_scalar(s, r.x);
    for (Stratum t : s.strata()) {
      std::vector<oracle::Pair> pairs;
      for (std::size_t i = 0; i < r.n; ++i)
        for (std::size_t j = 0; j < r.n; ++j)
          if (a[i][j] > 0 && oracle_stratum(in, i, j, r.directed) == int(t)) pairs.push_back({r.x[i], r.x[j], a[i][j]});
      const auto& got = prof.at(t);
      if (pairs.empty()) {
        EXPECT_EQ(got.reason, UndefinedReason::EmptyStratum);
        continue;
      }
      auto want = oracle::pearson(pairs);
      ASSERT_EQ(got.has_value(), want.has_value()) << k << " " << stratum_name(t, r.directed);
      if (want) EXPECT_NEAR(*got.value, *want, 1e-10);
    }
  }
}

TEST(ProfileCategorical, K22SideLabels) {
  auto inst = k22();
  auto s = stratify_arcs(inst.graph, inst.partition);
  auto prof = profile_categorical(s, inst.partition.labels());
  EXPECT_NEAR(*prof.at(Stratum::BB).value, -1.0, 1e-12);
  EXPECT_EQ(prof.at(Stratum::II).reason, UndefinedReason::EmptyStratum);
  EXPECT_EQ(prof.at(Stratum::IB).reason, UndefinedReason::EmptyStratum);
}

TEST(ProfileCategorical, ConstantLabels) {
  auto inst = two_triangle_bridge();
  auto s = stratify_arcs(inst.graph, inst.partition);
  auto prof = profile_categorical(s, std::vector<BlockId>(6, 0));
  for (const auto& e : prof.entries) EXPECT_EQ(e.rho.reason, UndefinedReason::ZeroDenominator);
}

TEST(ProfileCategorical, RandomMatchesMixingOracle) {
  std::mt19937_64 rng(55);
  for (int k = 0; k < 100; ++k) {
    auto r = testing_support::random_instance(rng);
    std::vector<BlockId> labels(r.n);
    const std::size_t kk = 3;
    for (auto& l : labels) l = std::uniform_int_distribution<BlockId>(0, kk - 1)(rng);
    auto a = testing_support::dense_of(r);
    auto in = oracle::interior(a, r.block);
    auto s = stratify_arcs(r.graph, r.partition);
    auto prof = profile_categorical(s, labels, kk);
    for (Stratum t : s.strata()) {
      std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> arcs;
      for (std::size_t i = 0; i < r.n; ++i)
        for (std::size_t j = 0; j < r.n; ++j)
          if (a[i][j] > 0 && oracle_stratum(in, i, j, r.directed) == int(t)) arcs.emplace_back(labels[i], labels[j], a[i][j]);
      const auto& got = prof.at(t);
      if (arcs.empty()) {
        EXPECT_EQ(got.reason, UndefinedReason::EmptyStratum);
        continue;
      }
      auto want = mixing_oracle(arcs, kk);
      ASSERT_EQ(got.has_value(), want.has_value());
      if (want) EXPECT_NEAR(*got.value, *want, 1e-12);
    }
  }
}

TEST(Multipartite, ClosedForm) {
  EXPECT_NEAR(multipartite_rho(std::vector<double>{0.5, 0.5}), -1.0, 1e-15);
  EXPECT_NEAR(multipartite_rho(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}), -0.5, 1e-15);
  expect_code(ErrorCode::DegenerateMarginals, [] { multipartite_rho(std::vector<double>{1.0, 0.0}); });
  expect_code(ErrorCode::InvalidArgument, [] { multipartite_rho(std::vector<double>{0.7, 0.7}); });
}

TEST(Multipartite, K22MatchesCategorical) {
  auto inst = k22();
  auto res = rho_categorical(inst.graph, inst.partition.labels());
  std::vector<double> a(res.mixing.a.data(), res.mixing.a.data() + res.mixing.a.size());
  EXPECT_NEAR(multipartite_rho(a), *res.rho.value, 1e-12);
}
