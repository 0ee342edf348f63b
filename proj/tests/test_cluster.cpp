#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "srsp/cluster.hpp"
#include "srsp/error.hpp"

using namespace srsp;

namespace {

Partition labels(std::vector<std::size_t> v) { return Partition::from_labels(v); }

// Two triangles {0,1,2} and {3,4,5}, unit affinities, no edge between them.
Eigen::MatrixXd two_triangles() {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(6, 6);
  for (int b : {0, 3})
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) A(b + i, b + j) = 1.0;
  return A;
}

Eigen::MatrixXd blob_kernel(std::size_t per_cluster, std::size_t clusters, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  const auto n = static_cast<Eigen::Index>(per_cluster * clusters);
  Eigen::MatrixXd X(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = static_cast<double>(static_cast<std::size_t>(i) / per_cluster);
    X(i, 0) = 5.0 * c + noise(rng);
    X(i, 1) = -3.0 * c + noise(rng);
  }
  return X * X.transpose();
}

}  // namespace

TEST(Partition, RelabelsByFirstAppearance) {
  auto p = labels({7, 7, 3, 9, 3});
  EXPECT_EQ(p.assignment, (std::vector<std::size_t>{0, 0, 1, 2, 1}));
  EXPECT_EQ(p.k, 3u);
}

TEST(Scores, IdenticalPartitions) {
  auto u = labels({0, 0, 1, 1, 2});
  EXPECT_DOUBLE_EQ(nmi(u, u), 1.0);
  EXPECT_DOUBLE_EQ(ari(u, u), 1.0);
}

TEST(Scores, CrossedTwoByTwo) {
  auto u = labels({0, 0, 1, 1});
  auto v = labels({0, 1, 0, 1});
  EXPECT_NEAR(ari(u, v), -0.5, 1e-12);
  EXPECT_NEAR(nmi(u, v), 0.0, 1e-12);
}

TEST(Scores, DegenerateConventions) {
  auto one = labels({0, 0, 0});
  auto split = labels({0, 1, 2});
  EXPECT_EQ(nmi(one, one), 1.0);
  EXPECT_EQ(ari(one, one), 1.0);
  EXPECT_EQ(ari(split, split), 1.0);
  EXPECT_EQ(ari(one, split), 0.0);
  EXPECT_EQ(nmi(one, split), 0.0);
  EXPECT_THROW(nmi(one, labels({0, 1})), ValidationError);
}

TEST(Scores, InvariantUnderRelabeling) {
  std::mt19937_64 rng(211);
  std::uniform_int_distribution<std::size_t> pick(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> a(30), b(30);
    for (auto& x : a) x = pick(rng);
    for (auto& x : b) x = pick(rng);
    std::vector<std::size_t> perm{2, 0, 3, 1};
    std::vector<std::size_t> b2(30);
    for (std::size_t i = 0; i < 30; ++i) b2[i] = perm[b[i]] + 10;
    EXPECT_NEAR(nmi(labels(a), labels(b)), nmi(labels(a), labels(b2)), 1e-12);
    EXPECT_NEAR(ari(labels(a), labels(b)), ari(labels(a), labels(b2)), 1e-12);
    EXPECT_NEAR(nmi(labels(a), labels(b)), nmi(labels(b), labels(a)), 1e-12);
    EXPECT_NEAR(ari(labels(a), labels(b)), ari(labels(b), labels(a)), 1e-12);
    const double n = nmi(labels(a), labels(b));
    EXPECT_GE(n, 0.0);
    EXPECT_LE(n, 1.0);
  }
}

TEST(Scores, RandomLabelPermutationsHaveZeroMeanAri) {
  std::vector<std::size_t> u(100);
  for (std::size_t i = 0; i < 100; ++i) u[i] = i % 4;
  std::mt19937_64 rng(223);
  double total = 0.0;
  for (int draw = 0; draw < 1000; ++draw) {
    auto v = u;
    std::shuffle(v.begin(), v.end(), rng);
    total += ari(labels(u), labels(v));
  }
  EXPECT_LE(std::abs(total / 1000.0), 0.02);
}

TEST(Modularity, TwoDisjointTriangles) {
  EXPECT_NEAR(modularity(labels({0, 0, 0, 1, 1, 1}), two_triangles()), 0.5, 1e-12);
}

TEST(Modularity, AllInOneIsZero) {
  std::mt19937_64 rng(227);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = test::random_strong_graph(20, 0.2, rng);
    EXPECT_NEAR(modularity(labels(std::vector<std::size_t>(20, 0)), g), 0.0, 1e-12);
  }
  EXPECT_NEAR(modularity(labels(std::vector<std::size_t>(6, 4)), two_triangles()), 0.0, 1e-12);
}

TEST(Modularity, RandomPartitionOfRandomGraphIsNearZero) {
  auto lg = test::planted_partition(200, 1, 0.05, 0.05, 229);
  std::mt19937_64 rng(233);
  std::uniform_int_distribution<std::size_t> pick(0, 1);
  std::vector<std::size_t> v(200);
  for (auto& x : v) x = pick(rng);
  EXPECT_LE(std::abs(modularity(labels(v), lg.graph)), 0.1);
}

TEST(Modularity, Validation) {
  EXPECT_THROW(modularity(labels({0, 1}), Eigen::MatrixXd::Zero(2, 2)), ValidationError);
  EXPECT_THROW(modularity(labels({0, 1, 0}), two_triangles()), ValidationError);
}

TEST(KernelKMeans, RecoversTwoBlocks) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(6, 6);
  K.topLeftCorner(3, 3).setOnes();
  K.bottomRightCorner(3, 3).setOnes();
  KMeansOptions o;
  o.k = 2;
  auto res = kernel_kmeans(K, o);
  EXPECT_DOUBLE_EQ(ari(res.partition, labels({0, 0, 0, 1, 1, 1})), 1.0);
  EXPECT_NEAR(res.objective, 0.0, 1e-12);
  EXPECT_FALSE(res.collapsed);
}

TEST(KernelKMeans, IdentityWithKEqualNGivesSingletons) {
  KMeansOptions o;
  o.k = 5;
  auto res = kernel_kmeans(Eigen::MatrixXd::Identity(5, 5), o);
  EXPECT_EQ(res.partition.k, 5u);
  EXPECT_NEAR(res.objective, 0.0, 1e-12);
}

TEST(KernelKMeans, ObjectiveNeverIncreases) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    KMeansOptions o;
    o.k = 4;
    o.restarts = 1;
    o.seed = seed;
    auto res = kernel_kmeans(blob_kernel(15, 4, seed), o);
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
      EXPECT_LE(res.objective_trace[i], res.objective_trace[i - 1] * (1 + 1e-12) + 1e-12);
    EXPECT_DOUBLE_EQ(res.objective, res.objective_trace.back());
  }
}

TEST(KernelKMeans, SeparatedBlobsAndDeterminism) {
  auto K = blob_kernel(20, 3, 5);
  std::vector<std::size_t> truth(60);
  for (std::size_t i = 0; i < 60; ++i) truth[i] = i / 20;
  KMeansOptions o;
  o.k = 3;
  o.seed = 42;
  auto a = kernel_kmeans(K, o);
  auto b = kernel_kmeans(K, o);
  EXPECT_DOUBLE_EQ(ari(a.partition, labels(truth)), 1.0);
  EXPECT_EQ(a.partition.assignment, b.partition.assignment);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(KernelKMeans, CoincidentPointsCollapse) {
  // Every point identical: any k >= 2 must leave clusters empty or the
  // objective at zero with arbitrary splits.
  KMeansOptions o;
  o.k = 3;
  o.restarts = 3;
  auto res = kernel_kmeans(Eigen::MatrixXd::Ones(4, 4), o);
  EXPECT_NEAR(res.objective, 0.0, 1e-12);
  EXPECT_LE(res.partition.k, 3u);
}

TEST(KernelKMeans, Validation) {
  KMeansOptions o;
  o.k = 1;
  EXPECT_THROW(kernel_kmeans(Eigen::MatrixXd::Identity(3, 3), o), ValidationError);
  o.k = 4;
  EXPECT_THROW(kernel_kmeans(Eigen::MatrixXd::Identity(3, 3), o), ValidationError);
  o.k = 2;
  o.restarts = 0;
  EXPECT_THROW(kernel_kmeans(Eigen::MatrixXd::Identity(3, 3), o), ValidationError);
}

TEST(Grid, ParsesRangesAndLists) {
  auto g = parse_grid("1e-4..1e5");
  ASSERT_EQ(g.size(), 10u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-4);
  EXPECT_DOUBLE_EQ(g.back(), 1e5);
  EXPECT_EQ(parse_grid("0.5,2"), (std::vector<double>{0.5, 2.0}));
  EXPECT_EQ(parse_grid("3"), (std::vector<double>{3.0}));
  EXPECT_THROW(parse_grid("1,-2"), ValidationError);
  EXPECT_THROW(parse_grid("a..b"), ValidationError);
  EXPECT_THROW(parse_grid("10..1"), ValidationError);
}

TEST(Labels, LoadsAndValidates) {
  auto g = test::karate();
  auto truth = test::karate_labels(g);
  EXPECT_EQ(truth.size(), 34u);
  EXPECT_EQ(truth.k, 2u);
  std::istringstream missing("0 0\n");
  EXPECT_THROW(load_labels(missing, g), ValidationError);
  std::istringstream unknown("99 0\n");
  EXPECT_THROW(load_labels(unknown, g), ValidationError);
}

TEST(Tune, SingleGridPointIsOneEvaluation) {
  auto lg = test::planted_partition(40, 2, 0.4, 0.02, 7);
  ReferenceMatrix ref(lg.graph, ReferenceKind::Natural);
  TuneOptions o;
  o.grid = {1.0};
  o.restarts = 5;
  auto res = tune_parameter(lg.graph, ref, o, lg.labels);
  ASSERT_EQ(res.grid.size(), 1u);
  EXPECT_TRUE(res.grid[0].ok);
  EXPECT_EQ(res.best_theta, 1.0);
  EXPECT_DOUBLE_EQ(res.scores.modularity, modularity(res.partition, lg.graph));
  EXPECT_GE(res.scores.ari, 0.9);
}

TEST(Tune, FailedGridPointsAreSkipped) {
  auto lg = test::planted_partition(30, 2, 0.5, 0.05, 11);
  ReferenceMatrix ref(lg.graph, ReferenceKind::Natural);
  TuneOptions o;
  o.grid = {std::numeric_limits<double>::infinity(), 0.5};
  o.restarts = 3;
  auto res = tune_parameter(lg.graph, ref, o);
  EXPECT_FALSE(res.grid[0].ok);
  EXPECT_TRUE(res.grid[1].ok);
  EXPECT_EQ(res.warnings.size(), 1u);
  EXPECT_EQ(res.best_theta, 0.5);
  o.grid = {std::numeric_limits<double>::infinity()};
  EXPECT_THROW(tune_parameter(lg.graph, ref, o), ValidationError);
}

TEST(Tune, ParallelGridMatchesSerial) {
  auto lg = test::planted_partition(40, 2, 0.3, 0.05, 13);
  ReferenceMatrix ref(lg.graph, ReferenceKind::Natural);
  TuneOptions o;
  o.grid = {0.01, 0.1, 1.0, 10.0};
  o.restarts = 5;
  o.seed = 99;
  auto serial = tune_parameter(lg.graph, ref, o, lg.labels);
  o.jobs = 4;
  auto parallel = tune_parameter(lg.graph, ref, o, lg.labels);
  EXPECT_EQ(serial.best_theta, parallel.best_theta);
  EXPECT_EQ(serial.partition.assignment, parallel.partition.assignment);
  for (std::size_t i = 0; i < serial.grid.size(); ++i)
    EXPECT_EQ(serial.grid[i].scores.modularity, parallel.grid[i].scores.modularity);
}
