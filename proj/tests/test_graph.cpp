#include <gtest/gtest.h>

#include <random>

#include "support/helpers.hpp"

using namespace ibprof;
using testing_support::build;
using testing_support::expect_code;

namespace {

Graph cycle(std::size_t n) { return dir_cycle(n).graph; }

}  // namespace

TEST(BuildGraph, SingleArc) {
  auto g = build(2, {{0, 1, 1}}, true);
  ASSERT_EQ(g.arcs().size(), 1u);
  EXPECT_DOUBLE_EQ(g.strengths().total_mass, 1.0);
}

TEST(BuildGraph, ParallelArcsMerge) {
  auto g = build(2, {{0, 1, 1}, {0, 1, 2}}, true);
  ASSERT_EQ(g.arcs().size(), 1u);
  EXPECT_EQ(g.arcs()[0], (Arc{0, 1, 3}));
}

TEST(BuildGraph, UndirectedCanonicalized) {
  auto g = build(3, {{1, 0, 1}}, false);
  ASSERT_EQ(g.arcs().size(), 1u);
  EXPECT_EQ(g.arcs()[0], (Arc{0, 1, 1}));
  EXPECT_EQ(g.strengths().out_strength, (std::vector<double>{1, 1, 0}));
}

TEST(BuildGraph, ReversedUndirectedDuplicatesMerge) {
  auto g = build(2, {{0, 1, 1}, {1, 0, 2}}, false);
  ASSERT_EQ(g.arcs().size(), 1u);
  EXPECT_DOUBLE_EQ(g.arcs()[0].weight, 3.0);
}

TEST(BuildGraph, ZeroWeightsDropped) {
  auto g = build(3, {{0, 1, 0}, {1, 2, 1}}, true);
  EXPECT_EQ(g.arcs().size(), 1u);
  EXPECT_TRUE(g.unit_weights());
}

TEST(BuildGraph, Errors) {
  expect_code(ErrorCode::NegativeWeight, [] { build(2, {{0, 1, -1}}, true); });
  expect_code(ErrorCode::NodeIdOutOfRange, [] { build(2, {{0, 2, 1}}, true); });
}

TEST(BuildGraph, ArcViewListsUndirectedEdgesTwice) {
  auto g = build(3, {{0, 1, 1}, {1, 2, 2}, {2, 2, 1}}, false);
  EXPECT_EQ(g.adjacency_entries().size(), 6u);
  // Self-loop contributes A_uu = 2w.
  EXPECT_DOUBLE_EQ(g.strengths().out_strength[2], 2.0 + 2.0);
  EXPECT_EQ(g.in_entries(1).size(), 2u);
}

TEST(Strengths, DirectedCycle) {
  auto s = cycle(4).strengths();
  EXPECT_EQ(s.out_strength, (std::vector<double>(4, 1.0)));
  EXPECT_EQ(s.in_strength, (std::vector<double>(4, 1.0)));
  EXPECT_DOUBLE_EQ(s.total_mass, 4.0);
}

TEST(Strengths, K22) {
  auto s = k22().graph.strengths();
  EXPECT_EQ(s.out_strength, (std::vector<double>(4, 2.0)));
  EXPECT_DOUBLE_EQ(s.total_mass, 4.0);
}

TEST(Strengths, TwoTriangleBridge) {
  auto s = two_triangle_bridge().graph.strengths();
  EXPECT_EQ(s.out_strength, (std::vector<double>{2, 2, 3, 3, 2, 2}));
  EXPECT_EQ(s.in_strength, s.out_strength);
  EXPECT_DOUBLE_EQ(s.total_mass, 7.0);
}

TEST(Strengths, HandshakeOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    auto r = testing_support::random_instance(rng);
    auto s = r.graph.strengths();
    double so = 0, si = 0;
    for (double v : s.out_strength) so += v;
    for (double v : s.in_strength) si += v;
    EXPECT_NEAR(so, si, 1e-12 * std::max(1.0, so));
    auto a = testing_support::dense_of(r);
    for (std::size_t i = 0; i < r.n; ++i) {
      double row = 0;
      for (double v : a[i]) row += v;
      EXPECT_NEAR(s.out_strength[i], row, 1e-12 * std::max(1.0, row));
    }
  }
}

TEST(SpectralRadius, DirectedCycleIsOne) {
  for (std::size_t n : {2, 3, 7, 20}) EXPECT_NEAR(spectral_radius(cycle(n)).value, 1.0, 1e-12);
}

TEST(SpectralRadius, CompleteGraph) {
  std::vector<oracle::RawEdge> e;
  for (std::uint32_t a = 0; a < 4; ++a)
    for (std::uint32_t b = a + 1; b < 4; ++b) e.push_back({a, b, 1});
  EXPECT_NEAR(spectral_radius(build(4, e, false)).value, 3.0, 1e-12);
}

TEST(SpectralRadius, TwoTriangleBridgeMatchesDenseEigensolver) {
  auto inst = two_triangle_bridge();
  std::vector<oracle::RawEdge> e;
  for (const auto& a : inst.graph.arcs()) e.push_back({a.tail, a.head, a.weight});
  auto ev = oracle::jacobi_eigenvalues(oracle::adjacency(6, e, false));
  const double rho = std::max(std::abs(ev.front()), std::abs(ev.back()));
  EXPECT_NEAR(spectral_radius(inst.graph).value, rho, 1e-8);
}

TEST(SpectralRadius, SymmetricRandomMatchesEigen) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 5 + t * 3;
    auto e = oracle::random_connected_undirected(rng, n, 0.2, t % 2 == 0);
    auto g = build(n, e, false);
    auto ev = oracle::jacobi_eigenvalues(oracle::adjacency(n, e, false));
    const double rho = std::max(std::abs(ev.front()), std::abs(ev.back()));
    EXPECT_NEAR(spectral_radius(g).value, rho, 1e-8 * std::max(1.0, rho)) << "n=" << n;
  }
}

TEST(SpectralRadius, BipartiteNegativeEigenvalueDoesNotStall) {
  // K_{2,2}: eigenvalues +-2, plain power iteration oscillates.
  EXPECT_NEAR(spectral_radius(k22().graph).value, 2.0, 1e-12);
}

TEST(SpectralRadius, ReducibleTakesLargestComponent) {
  // 2-cycle (rho 1) feeding a weighted 3-cycle (rho 2).
  auto g = build(5, {{0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {2, 3, 2}, {3, 4, 2}, {4, 2, 2}}, true);
  auto r = spectral_radius(g);
  EXPECT_NEAR(r.value, 2.0, 1e-12);
  EXPECT_FALSE(r.strongly_connected);
}

TEST(SpectralRadius, Dag) {
  EXPECT_DOUBLE_EQ(spectral_radius(build(3, {{0, 1, 1}, {1, 2, 1}}, true)).value, 0.0);
}

TEST(SpectralRadius, EmptyGraphThrows) {
  expect_code(ErrorCode::EmptyGraph, [] { spectral_radius(build(3, {}, true)); });
}

TEST(SpectralRadius, BracketContainsValue) {
  std::mt19937_64 rng(8);
  auto e = oracle::random_strong(rng, 15, 0.2, true);
  auto r = spectral_radius(build(15, e, true));
  EXPECT_LE(r.lower, r.value + 1e-15);
  EXPECT_GE(r.upper, r.value - 1e-15);
  EXPECT_LE(r.upper - r.lower, 1e-12 * std::max(1.0, r.upper));
}

TEST(Connectivity, Examples) {
  EXPECT_TRUE(is_strongly_connected(cycle(4)));
  EXPECT_FALSE(is_strongly_connected(build(2, {}, true)));
  EXPECT_FALSE(is_strongly_connected(build(3, {{0, 1, 1}, {1, 2, 1}}, true)));
  EXPECT_TRUE(is_strongly_connected(build(3, {{0, 1, 1}, {1, 2, 1}}, false)));
}

TEST(Connectivity, ComponentsOfReducibleGraph) {
  auto g = build(5, {{0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {2, 3, 1}, {3, 2, 1}}, true);
  auto c = strongly_connected_components(g);
  EXPECT_EQ(c[0], c[1]);
  EXPECT_EQ(c[2], c[3]);
  EXPECT_NE(c[0], c[2]);
  EXPECT_NE(c[4], c[0]);
  EXPECT_NE(c[4], c[2]);
}

TEST(Projection, Examples) {
  auto p = undirected_projection(build(2, {{0, 1, 1}, {1, 0, 2}}, true));
  EXPECT_FALSE(p.directed());
  ASSERT_EQ(p.arcs().size(), 1u);
  EXPECT_EQ(p.arcs()[0], (Arc{0, 1, 3}));

  auto tri = undirected_projection(cycle(3));
  ASSERT_EQ(tri.arcs().size(), 3u);
  for (const auto& a : tri.arcs()) EXPECT_DOUBLE_EQ(a.weight, 1.0);

  auto loop = undirected_projection(build(1, {{0, 0, 1}}, true));
  EXPECT_TRUE(loop.arcs().empty());
}

TEST(Projection, SymmetrizedGraphDoublesWeights) {
  auto g = two_triangle_bridge().graph;
  auto p = undirected_projection(g.as_directed());
  ASSERT_EQ(p.arcs().size(), g.arcs().size());
  for (std::size_t i = 0; i < p.arcs().size(); ++i) {
    EXPECT_EQ(p.arcs()[i].tail, g.arcs()[i].tail);
    EXPECT_DOUBLE_EQ(p.arcs()[i].weight, 2 * g.arcs()[i].weight);
  }
}

TEST(AsDirected, KeepsAdjacency) {
  auto g = build(3, {{0, 1, 1}, {1, 2, 2}, {2, 2, 1}}, false);
  auto d = g.as_directed();
  EXPECT_TRUE(d.directed());
  auto a = g.strengths(), b = d.strengths();
  EXPECT_EQ(a.out_strength, b.out_strength);
  EXPECT_EQ(a.in_strength, b.in_strength);
}

TEST(PerronVector, PositiveEigenvector) {
  std::mt19937_64 rng(3);
  auto e = oracle::random_strong(rng, 12, 0.25, true);
  auto g = build(12, e, true);
  const double rho = spectral_radius(g).value;
  auto a = oracle::adjacency(12, e, true);
  for (bool tr : {false, true}) {
    auto v = perron_vector(g, tr);
    for (std::size_t i = 0; i < 12; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < 12; ++j) s += (tr ? a[j][i] : a[i][j]) * v[j];
      EXPECT_GT(v[i], 0);
      EXPECT_NEAR(s, rho * v[i], 1e-9);
    }
  }
}
