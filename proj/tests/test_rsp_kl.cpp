#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "srsp/error.hpp"
#include "srsp/rsp_kl.hpp"
#include "srsp/rsp_tsallis.hpp"

using namespace srsp;

TEST(Temperature, ThetaAndTAreReciprocal) {
  EXPECT_DOUBLE_EQ(Temperature::from_theta(4.0).T(), 0.25);
  EXPECT_DOUBLE_EQ(Temperature::from_T(0.5).theta(), 2.0);
  EXPECT_THROW(Temperature::from_theta(-1.0), ValidationError);
  EXPECT_THROW(Temperature::from_theta(0.0), ValidationError);
  EXPECT_THROW(Temperature::from_T(std::nan("")), ValidationError);
}

TEST(KlPolicy, MatchesClosedFormFreeEnergy) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = test::random_strong_graph(12, 0.25, rng);
    ReferenceMatrix ref(g, trial % 2 ? ReferenceKind::Natural : ReferenceKind::Uniform);
    const NodeId t = trial % g.size();
    for (double theta : {0.05, 0.5, 2.0}) {
      auto policy = kl_policy_iterate(g, ref, t, Temperature::from_theta(theta));
      auto want = test::kl_free_energy_closed_form(g, ref, t, theta);
      for (NodeId i = 0; i < g.size(); ++i)
        EXPECT_NEAR(policy.potential[i], want[i], 1e-8 * (1.0 + std::abs(want[i])));
    }
  }
}

TEST(KlPolicy, AgreesWithSoftminRecursion) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = test::random_strong_graph(15, 0.2, rng);
    ReferenceMatrix ref(g, ReferenceKind::Natural);
    const auto temperature = Temperature::from_theta(trial % 2 ? 1.0 : 0.2);
    auto policy = kl_policy_iterate(g, ref, 0, temperature);
    PolicyOptions tight;
    tight.tolerance = 1e-14;
    tight.max_iterations = 1000000;
    auto bf = softmin_recursion(g, ref, 0, temperature, tight);
    for (NodeId i = 0; i < g.size(); ++i) EXPECT_NEAR(policy.potential[i], bf.potential[i], 1e-8);
  }
}

TEST(KlPolicy, TenNodeAtLowTemperatureMatchesWalkEnumeration) {
  auto g = test::ten_node();
  ReferenceMatrix ref(g, ReferenceKind::Uniform);
  const auto s = *g.find_node("s");
  const auto t = *g.find_node("t");
  const double theta = 20.0;
  auto policy = kl_policy_iterate(g, ref, t, Temperature::from_theta(theta));
  // The only walk within 5 of the optimum is s-a-d-f-t with reference
  // probability 1/3 * 1/3 * 1/5 * 1/3.
  const double walks = test::kl_free_energy_by_walks(g, ref, s, t, theta, 16.0);
  EXPECT_NEAR(policy.potential[s], walks, 1e-3);
  EXPECT_NEAR(policy.potential[s], 11.0 + std::log(135.0) / theta, 1e-3);
}

TEST(KlPolicy, RowsAreFullAndStochastic) {
  auto g = test::ten_node();
  ReferenceMatrix ref(g, ReferenceKind::Uniform);
  const auto t = *g.find_node("t");
  auto policy = kl_policy_iterate(g, ref, t, Temperature::from_theta(1.0));
  for (NodeId i = 0; i < g.size(); ++i) {
    const auto row = policy.transitions.row(i);
    double total = 0.0;
    for (double p : row) {
      if (i == t) {
        EXPECT_EQ(p, 0.0);
      } else {
        EXPECT_GT(p, 0.0);
      }
      total += p;
    }
    EXPECT_NEAR(total, i == t ? 0.0 : 1.0, 1e-12);
  }
  EXPECT_EQ(policy.potential[t], 0.0);
}

TEST(KlPolicy, ZeroDualityGapAgainstExplicitPrimal) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = test::random_strong_graph(10, 0.3, rng);
    ReferenceMatrix ref(g, ReferenceKind::Natural);
    auto policy = kl_policy_iterate(g, ref, 3, Temperature::from_theta(0.7));
    EXPECT_GE(policy.duality_gap, 0.0);
    EXPECT_LE(policy.duality_gap, 1e-8);
    for (NodeId s = 0; s < g.size(); ++s) {
      if (s == 3) continue;
      const double primal = primal_objective(policy.transitions, g, ref, policy.temperature,
                                             policy.divergence, s);
      EXPECT_NEAR(primal, policy.potential[s], 1e-8 * (1.0 + std::abs(primal)));
    }
  }
}

TEST(KlPolicy, InterpolatesBetweenShortestPathAndReferenceWalk) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = test::random_strong_graph(12, 0.2, rng);
    ReferenceMatrix ref(g, ReferenceKind::Natural);
    const NodeId t = 0;
    auto cold = kl_policy_iterate(g, ref, t, Temperature::from_theta(200.0));
    auto hot = kl_policy_iterate(g, ref, t, Temperature::from_theta(1e-6));
    auto sp = shortest_path_costs_to(g, t);
    auto walk = test::absorbing_chain_costs(g, ref, t);
    auto cold_cost = expected_costs_to_target(cold, g);
    auto hot_cost = expected_costs_to_target(hot, g);
    for (NodeId s = 1; s < g.size(); ++s) {
      EXPECT_NEAR(cold_cost[s], sp[s], 1e-3 * sp[s]);
      EXPECT_NEAR(hot_cost[s], walk[s], 1e-3 * walk[s]);
    }
  }
}

TEST(KlPolicy, RejectsBadArguments) {
  auto g = test::ten_node();
  ReferenceMatrix ref(g, ReferenceKind::Uniform);
  EXPECT_THROW(kl_policy_iterate(g, ref, 99, Temperature::from_theta(1.0)), ValidationError);
  PolicyOptions bad;
  bad.relaxation = 0.0;
  EXPECT_THROW(kl_policy_iterate(g, ref, 0, Temperature::from_theta(1.0), bad), ValidationError);
}

TEST(KlPolicy, IterationCapRaisesConvergenceError) {
  auto g = test::ten_node();
  ReferenceMatrix ref(g, ReferenceKind::Uniform);
  PolicyOptions capped;
  capped.max_iterations = 1;
  try {
    kl_policy_iterate(g, ref, *g.find_node("t"), Temperature::from_theta(1.0), capped);
    FAIL() << "expected non-convergence";
  } catch (const ConvergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("target t"), std::string::npos) << e.what();
  }
}

TEST(KlPolicy, RelaxationReachesTheSameFixedPoint) {
  auto g = test::ten_node();
  ReferenceMatrix ref(g, ReferenceKind::Uniform);
  const auto t = *g.find_node("t");
  PolicyOptions damped;
  damped.relaxation = 0.5;
  auto a = kl_policy_iterate(g, ref, t, Temperature::from_theta(0.5));
  auto b = kl_policy_iterate(g, ref, t, Temperature::from_theta(0.5), damped);
  for (NodeId i = 0; i < g.size(); ++i) EXPECT_NEAR(a.potential[i], b.potential[i], 1e-8);
}

TEST(LinearSolve, IterativeMatchesDense) {
  std::mt19937_64 rng(59);
  auto g = test::random_strong_graph(30, 0.15, rng);
  ReferenceMatrix ref(g, ReferenceKind::Natural);
  TransitionMatrix P(g, ref, 0);
  std::vector<double> rhs(g.size(), 1.0);
  rhs[0] = 0.0;
  LinearSolverOptions iterative;
  iterative.dense_threshold = 0;
  auto dense = solve_potential(P, rhs);
  auto gs = solve_potential(P, rhs, iterative);
  for (NodeId i = 0; i < g.size(); ++i) EXPECT_NEAR(dense[i], gs[i], 1e-9 * (1.0 + dense[i]));
  auto vd = solve_visits(P, 5);
  auto vg = solve_visits(P, 5, iterative);
  for (NodeId i = 0; i < g.size(); ++i) EXPECT_NEAR(vd[i], vg[i], 1e-9 * (1.0 + vd[i]));
}

TEST(LinearSolve, SingularSystemIsReported) {
  auto g = test::ten_node();
  ReferenceMatrix ref(g, ReferenceKind::Uniform);
  // No absorbing row: I - P is singular.
  TransitionMatrix P(g);
  for (NodeId i = 0; i < g.size(); ++i)
    for (std::size_t k = 0; k < P.row(i).size(); ++k) P.row(i)[k] = ref.row(i)[k];
  std::vector<double> rhs(g.size(), 1.0);
  EXPECT_THROW(solve_potential(P, rhs), SingularSystemError);
}
