#include <gtest/gtest.h>

#include <random>

#include "support/helpers.hpp"

using namespace ibprof;
using testing_support::build;
using testing_support::expect_code;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST(SisRhs, ZeroStateIsFixed) {
  auto g = two_triangle_bridge().graph;
  auto d = sis_rhs(std::vector<double>(6, 0.0), {1.0, 1.0}, g);
  for (double v : d) EXPECT_EQ(v, 0.0);
}

TEST(SisRhs, SaturatedNodeRecovers) {
  auto g = two_triangle_bridge().graph;
  std::vector<double> x{1, 0.3, 0.2, 0.9, 0.1, 0.5};
  auto d = sis_rhs(x, {2.0, 0.7}, g);
  EXPECT_DOUBLE_EQ(d[0], -0.7);
}

TEST(SisRhs, RegularUniformState) {
  auto g = regular(10, 4).graph;
  const double c = 0.3, beta = 0.8, delta = 0.5;
  auto d = sis_rhs(std::vector<double>(10, c), {beta, delta}, g);
  for (double v : d) EXPECT_NEAR(v, -delta * c + (1 - c) * beta * 4 * c, 1e-15);
}

TEST(SisRhs, UsesInArcs) {
  // 0 -> 1: node 1 is infected by node 0, node 0 receives nothing.
  auto g = build(2, {{0, 1, 1}}, true);
  auto d = sis_rhs(std::vector<double>{0.5, 0.0}, {1.0, 1.0}, g);
  EXPECT_DOUBLE_EQ(d[0], -0.5);
  EXPECT_DOUBLE_EQ(d[1], 0.5);
}

TEST(SisRhs, Errors) {
  auto g = two_triangle_bridge().graph;
  expect_code(ErrorCode::StateOutOfRange, [&] { sis_rhs(std::vector<double>{1.1, 0, 0, 0, 0, 0}, {1, 1}, g); });
  expect_code(ErrorCode::InvalidArgument, [&] { sis_rhs(std::vector<double>(6, 0.1), {0.0, 1.0}, g); });
}

TEST(Integrate, ZeroStartStaysZero) {
  auto g = two_triangle_bridge().graph;
  auto tr = integrate(std::vector<double>(6, 0.0), {1, 1}, g, {5.0, 0.0, 10});
  for (const auto& s : tr.states)
    for (double v : s) EXPECT_EQ(v, 0.0);
}

TEST(Integrate, RegularConvergesToClosedForm) {
  auto g = regular(12, 4).graph;
  const double beta = 1.0, delta = 1.0;
  auto tr = integrate(std::vector<double>(12, 0.5), {beta, delta}, g, {60.0, 0.0, 0});
  for (double v : tr.states.back()) EXPECT_NEAR(v, 1 - delta / (beta * 4), 1e-8);
}

TEST(Integrate, StaysInCube) {
  std::mt19937_64 rng(81);
  auto g = build(20, oracle::random_strong(rng, 20, 0.2, true), true);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x0(20);
  for (double& v : x0) v = u(rng);
  auto tr = integrate(x0, {2.0, 0.5}, g, {20.0, 0.0, 1});
  for (const auto& s : tr.states)
    for (double v : s) {
      EXPECT_GE(v, -kInvarianceSlack);
      EXPECT_LE(v, 1 + kInvarianceSlack);
    }
}

TEST(Integrate, OversizedStepIsReported) {
  auto g = regular(10, 6).graph;
  expect_code(ErrorCode::InvarianceViolation,
              [&] { integrate(std::vector<double>(10, 0.9), {50.0, 1.0}, g, {5.0, 1.0, 0}); });
}

TEST(Equilibrium, RegularClosedForm) {
  for (auto [n, d] : {std::pair<std::size_t, std::size_t>{10, 3}, {12, 4}, {9, 8}}) {
    auto g = regular(n, d).graph;
    for (double beta : {0.5, 1.0, 3.0}) {
      const double delta = 1.0;
      auto r = endemic_equilibrium(g, {beta, delta});
      if (beta * double(d) / delta > 1) {
        for (double v : r.x_star) EXPECT_NEAR(v, 1 - delta / (beta * double(d)), 1e-8);
        EXPECT_LE(r.residual, 1e-12);
        EXPECT_GT(r.threshold_margin, 0);
      }
    }
  }
}

TEST(Equilibrium, BelowThresholdIsZero) {
  auto g = two_triangle_bridge().graph;
  const double rho = spectral_radius(g).value;
  for (double ratio : {0.3, 0.99, 1.0}) {
    auto r = endemic_equilibrium(g, {ratio / rho, 1.0});
    EXPECT_LE(r.threshold_margin, 1e-12);
    for (double v : r.x_star) EXPECT_EQ(v, 0.0);
  }
}

TEST(Equilibrium, TwoTriangleBridgeMatchesOdeLimit) {
  auto g = two_triangle_bridge().graph.as_directed();
  auto fp = endemic_equilibrium(g, {1.0, 1.0});
  auto tr = integrate(std::vector<double>(6, 0.5), {1.0, 1.0}, g, {200.0, 0.0, 0});
  EXPECT_LE(max_abs_diff(fp.x_star, tr.states.back()), 1e-6);
  EXPECT_LE(fp.rhs_residual, 1e-11);
}

TEST(Equilibrium, StartsAgreeAndMonotone) {
  std::mt19937_64 rng(82);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 8 + t * 4;
    auto g = build(n, oracle::random_strong(rng, n, 0.15, t % 2 == 0), true);
    const double rho = spectral_radius(g).value;
    SISParams params{2.0 / rho, 1.0};
    EquilibriumOptions sub;
    sub.start = FixedPointStart::Subsolution;
    sub.record_iterates = true;
    auto a = endemic_equilibrium(g, params);
    auto b = endemic_equilibrium(g, params, sub);
    EquilibriumOptions ones;
    ones.start = FixedPointStart::Ones;
    auto c = endemic_equilibrium(g, params, ones);
    EXPECT_LE(max_abs_diff(a.x_star, b.x_star), 1e-10);
    EXPECT_LE(max_abs_diff(a.x_star, c.x_star), 1e-10);
    EXPECT_TRUE(b.nondecreasing);
    for (std::size_t k = 1; k < b.iterates.size(); ++k)
      for (std::size_t i = 0; i < n; ++i) EXPECT_GE(b.iterates[k][i], b.iterates[k - 1][i]);
    EXPECT_TRUE(c.monotone);
    // Equilibrium equation, checked with a dense A^T product.
    auto arcs = g.arcs();
    std::vector<double> s(n, 0.0);
    for (const auto& arc : arcs) s[arc.head] += arc.weight * a.x_star[arc.tail];
    for (std::size_t i = 0; i < n; ++i)
      EXPECT_NEAR(-params.delta * a.x_star[i] + (1 - a.x_star[i]) * params.beta * s[i], 0.0, 1e-11);
  }
}

TEST(Equilibrium, OdeMethodAgrees) {
  std::mt19937_64 rng(83);
  auto g = build(25, oracle::random_strong(rng, 25, 0.1, true), true);
  const double rho = spectral_radius(g).value;
  SISParams params{1.5 / rho, 1.0};
  auto fp = endemic_equilibrium(g, params);
  auto ode = ode_equilibrium(g, params, std::vector<double>(25, 0.3));
  EXPECT_EQ(ode.method, EquilibriumMethod::OdeLimit);
  EXPECT_LE(max_abs_diff(fp.x_star, ode.x_star), 1e-6);
}

TEST(Dominance, UniformStateGivesZeroGaps) {
  auto inst = regular(12, 4);
  // Consecutive halves of a circulant: interior and boundary nodes in each half.
  auto roles = classify_roles(inst.graph, inst.partition);
  auto r = endemic_equilibrium(inst.graph, {1.0, 1.0});
  auto d = boundary_dominance(inst.graph, inst.partition, roles, r.x_star);
  for (const auto& g : d) {
    ASSERT_EQ(g.skipped, DominanceSkip::None);
    EXPECT_NEAR(*g.gap, 0.0, 1e-12);
    EXPECT_FALSE(g.dominant);
  }
}

TEST(Dominance, AmplifiedFixtureWeakCoupling) {
  auto inst = amplified(0.4, 0.004, {30, 30}, 7);
  auto roles = classify_roles(inst.graph, inst.partition);
  auto r = endemic_equilibrium(inst.graph, {0.25, 1.0});
  auto d = boundary_dominance(inst.graph, inst.partition, roles, r.x_star);
  for (const auto& g : d) {
    ASSERT_EQ(g.skipped, DominanceSkip::None);
    EXPECT_GT(*g.gap, 0.0);
    EXPECT_TRUE(g.dominant);
  }
}

TEST(Dominance, EmptyBoundarySkipped) {
  auto g = build(4, {{0, 1, 1}, {1, 0, 1}, {2, 3, 1}, {3, 2, 1}}, true);
  auto p = Partition::from_labels({0, 0, 1, 1});
  auto d = boundary_dominance(g, p, classify_roles(g, p), std::vector<double>(4, 0.5));
  for (const auto& e : d) EXPECT_EQ(e.skipped, DominanceSkip::EmptyBoundary);
}

TEST(Chain, AmplifiedWeakCoupling) {
  auto inst = amplified(0.4, 0.004, {30, 30}, 7);
  auto r = implication_chain(inst.graph, inst.partition, {0.25, 1.0});
  EXPECT_TRUE(r.dominance_all);
  EXPECT_TRUE(r.premises_hold);
  ASSERT_TRUE(r.phi_max.has_value());
  EXPECT_LT(*r.phi_max, 0.05);
  // Profile B->I entry and the sign report agree.
  ASSERT_TRUE(r.sign_report.has_value());
  EXPECT_EQ(r.profile.at(Stratum::BI).value, r.sign_report->observed.value);
  EXPECT_EQ(r.r_bi.value, r.sign_report->observed.value);
}

TEST(Chain, StrongCouplingPremisesFail) {
  SBMSpec spec;
  spec.block_sizes = {30, 30};
  spec.p_within = 0.4;
  spec.q_between = 0.4;
  spec.seed = 7;
  spec.model = SBMModel::Amplified;
  auto [g, p] = sbm(spec);
  auto r = implication_chain(g, p, {0.25, 1.0});
  EXPECT_FALSE(r.premises_hold);
  EXPECT_FALSE(r.prediction);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Chain, BelowThresholdDiseaseFree) {
  auto inst = two_triangle_bridge_directed();
  auto r = implication_chain(inst.graph, inst.partition, {0.1, 1.0});
  EXPECT_EQ(r.verdict, ChainVerdict::DiseaseFree);
  for (double v : r.equilibrium.x_star) EXPECT_EQ(v, 0.0);
  for (const auto& e : r.profile.entries) {
    if (e.count > 0) EXPECT_EQ(e.rho.reason, UndefinedReason::ZeroVariance);
  }
}

TEST(Chain, UndirectedInputIsSymmetrized) {
  auto inst = two_triangle_bridge();
  auto a = implication_chain(inst.graph, inst.partition, {1.0, 1.0});
  auto b = implication_chain(inst.graph.as_directed(), inst.partition, {1.0, 1.0});
  EXPECT_EQ(a.equilibrium.x_star, b.equilibrium.x_star);
  EXPECT_EQ(a.verdict, b.verdict);
}
