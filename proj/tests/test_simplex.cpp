#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "srsp/error.hpp"
#include "srsp/simplex.hpp"

using namespace srsp;

namespace {

SimplexProblem ramp(double r, double T) {
  return {{1, 2, 3, 4, 5}, uniform_reference(5), r, T};
}

void expect_vector_near(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "entry " << i;
}

std::vector<double> random_distribution(std::size_t m, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(m);
  for (auto& x : p) x = e(rng) + 1e-3;
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= total;
  return p;
}

SimplexProblem random_problem(std::mt19937_64& rng, double r) {
  std::uniform_int_distribution<std::size_t> size(1, 10);
  std::uniform_real_distribution<double> cost(0.0, 10.0);
  std::uniform_real_distribution<double> logT(-2.0, 1.5);
  SimplexProblem p;
  p.costs.resize(size(rng));
  for (auto& c : p.costs) c = cost(rng);
  p.reference = random_distribution(p.costs.size(), rng);
  p.r = r;
  p.temperature = std::pow(10.0, logT(rng));
  return p;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(Spmin, PrintedRampVectors) {
  expect_vector_near(spmin(ramp(2, 1)).p, {0.4, 0.3, 0.2, 0.1, 0.0}, 5e-4);
  expect_vector_near(spmin(ramp(2, 0.5)).p, {0.533, 0.333, 0.133, 0.0, 0.0}, 5e-4);
  expect_vector_near(spmin(ramp(1.5, 1)).p, {0.480, 0.295, 0.156, 0.0602, 0.00927}, 5e-4);
  expect_vector_near(spmin(ramp(4, 1)).p, {0.289, 0.262, 0.229, 0.182, 0.0375}, 5e-4);
  expect_vector_near(spmin(ramp(2, 5)).p, {0.240, 0.220, 0.200, 0.180, 0.160}, 5e-4);
}

TEST(Spmin, ExactZerosOnTheRamp) {
  EXPECT_EQ(spmin(ramp(2, 1)).p[4], 0.0);
  auto half = spmin(ramp(2, 0.5));
  EXPECT_EQ(half.p[3], 0.0);
  EXPECT_EQ(half.p[4], 0.0);
}

TEST(Spmin, EqualCostsReturnTheReference) {
  for (double r : {1.2, 2.0, 3.5})
    for (double T : {0.01, 1.0, 50.0})
      expect_vector_near(spmin({{1, 1}, {0.3, 0.7}, r, T}).p, {0.3, 0.7}, 1e-12);
}

TEST(Spmin, SingleEntry) {
  SimplexProblem p{{4.0}, {1.0}, 3.0, 2.0};
  auto s = spmin(p);
  expect_vector_near(s.p, {1.0}, 0.0);
  EXPECT_DOUBLE_EQ(s.mu, 4.0 + p.r * p.upsilon());
  EXPECT_EQ(kkt_residual(p, s), 0.0);
}

TEST(Spmin, Validation) {
  EXPECT_THROW(spmin({{}, {}, 2, 1}), ValidationError);
  EXPECT_THROW(spmin({{1, 2}, {0.5}, 2, 1}), ValidationError);
  EXPECT_THROW(spmin({{1, 2}, {0.5, 0.5}, 1.0, 1}), ValidationError);
  EXPECT_THROW(spmin({{1, 2}, {0.5, 0.5}, 2, 0.0}), ValidationError);
  EXPECT_THROW(spmin({{1, NAN}, {0.5, 0.5}, 2, 1}), ValidationError);
  EXPECT_THROW(spmin({{1, 2}, {0.6, 0.6}, 2, 1}), ValidationError);
  EXPECT_THROW(spmin_quadratic(ramp(1.5, 1)), ValidationError);
}

TEST(SpminQuadratic, RampHasFourActiveEntriesAndMuFive) {
  auto s = spmin_quadratic(ramp(2, 1));
  EXPECT_EQ(s.support, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_NEAR(s.mu, 5.0, 1e-12);
}

TEST(SpminQuadratic, UnsortedCostsAtTinyTemperature) {
  auto s = spmin_quadratic({{3, 1}, uniform_reference(2), 2, 1e-9});
  expect_vector_near(s.p, {0.0, 1.0}, 0.0);
}

TEST(SpminQuadratic, SkewedReferenceHandExample) {
  SimplexProblem p{{1, 2}, {0.9, 0.1}, 2, 0.05};
  auto s = spmin_quadratic(p);
  expect_vector_near(s.p, {1.0, 0.0}, 0.0);
  EXPECT_NEAR(s.mu, 1.0 + 1.0 / 9.0, 1e-12);
  auto b = spmin_bisection(p);
  expect_vector_near(b.p, s.p, 1e-9);
}

TEST(SpminQuadratic, BoundaryElementGetsZero) {
  // Uniform ramp [0, 1, 2] with T = 1/2: L1 at mu = 2 is exactly 1.
  SimplexProblem p{{0, 1, 2}, uniform_reference(3), 2, 0.5};
  auto s = spmin_quadratic(p);
  EXPECT_EQ(s.p[2], 0.0);
  EXPECT_NEAR(s.mu, 2.0, 1e-12);
  EXPECT_EQ(s.support.size(), 2u);
}

TEST(SpminQuadratic, MatchesSupportEnumeration) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    auto p = random_problem(rng, 2.0);
    auto want = test::spmin_r2_by_supports(p.costs, p.reference, p.temperature);
    expect_vector_near(spmin_quadratic(p).p, want, 1e-10);
  }
}

TEST(SpminBisection, RampMuClosedForm) {
  auto s = spmin_bisection(ramp(1.5, 1));
  EXPECT_NEAR(s.mu, 3.0 + std::sqrt(7.0), 1e-9);
}

TEST(SpminBisection, AgreesWithLinearSearch) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    auto p = random_problem(rng, 2.0);
    expect_vector_near(spmin_bisection(p).p, spmin_quadratic(p).p, 1e-9);
  }
}

TEST(SpminBisection, LargeTemperatureApproachesReference) {
  std::mt19937_64 rng(9);
  for (double r : {1.3, 2.0, 3.0}) {
    auto p = random_problem(rng, r);
    // Deviation from the reference is at most ref_i * (max c - min c) / (r T).
    p.temperature = 1e8;
    expect_vector_near(spmin(p).p, p.reference, 1e-6);
  }
}

TEST(SpminBisection, NearOneApproachesSoftmax) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = random_problem(rng, 1.01);
    std::vector<double> soft(p.costs.size());
    const double cmin = *std::min_element(p.costs.begin(), p.costs.end());
    for (std::size_t i = 0; i < soft.size(); ++i)
      soft[i] = p.reference[i] * std::exp(-(p.costs[i] - cmin) / p.temperature);
    const double z = sum(soft);
    for (auto& x : soft) x /= z;
    std::vector<double> errors;
    for (double r : {1.01, 1.001, 1.0001}) {
      p.r = r;
      const auto got = spmin(p).p;
      double e = 0.0;
      for (std::size_t i = 0; i < got.size(); ++i) e = std::max(e, std::abs(got[i] - soft[i]));
      errors.push_back(e);
    }
    EXPECT_LE(errors[2], 1e-3) << "T " << p.temperature;
    EXPECT_LE(errors[2], errors[0] + 1e-12) << "T " << p.temperature;
  }
}

TEST(SpminProperties, SimplexAndSupportInvariants) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> rdist(1.05, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    auto p = random_problem(rng, trial % 2 ? 2.0 : rdist(rng));
    auto s = spmin(p);
    EXPECT_NEAR(sum(s.p), 1.0, 1e-12);
    EXPECT_LE(s.kkt_residual, 1e-9);
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < s.p.size(); ++i) {
      EXPECT_GE(s.p[i], 0.0);
      if (s.p[i] > 0.0) {
        support.push_back(i);
        EXPECT_LT(p.costs[i], s.mu + 1e-9);
      } else {
        EXPECT_GE(p.costs[i], s.mu - 1e-9);
      }
    }
    EXPECT_EQ(support, s.support);
  }
}

TEST(SpminProperties, ObjectiveBeatsRandomFeasiblePoints) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> rdist(1.1, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_problem(rng, rdist(rng));
    const double best = simplex_objective(p, spmin(p).p);
    EXPECT_LE(best, simplex_objective(p, p.reference) + 1e-12);
    for (int k = 0; k < 100; ++k)
      EXPECT_LE(best, simplex_objective(p, random_distribution(p.costs.size(), rng)) + 1e-12);
  }
}

TEST(SpminProperties, SupportGrowsWithTemperature) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_problem(rng, trial % 2 ? 2.0 : 3.0);
    std::size_t last = 0;
    for (double T : {1e-3, 1e-2, 0.1, 0.5, 1.0, 5.0, 20.0, 100.0}) {
      p.temperature = T;
      const auto size = spmin(p).support.size();
      EXPECT_GE(size, last);
      last = size;
    }
  }
}

TEST(SpminProperties, PermutationEquivariance) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_problem(rng, trial % 2 ? 2.0 : 1.7);
    std::vector<std::size_t> perm(p.costs.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    SimplexProblem q = p;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      q.costs[i] = p.costs[perm[i]];
      q.reference[i] = p.reference[perm[i]];
    }
    auto a = spmin(p).p;
    auto b = spmin(q).p;
    for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_NEAR(b[i], a[perm[i]], 1e-12);
  }
}

TEST(SpminProperties, ZeroReferenceEntriesStayZero) {
  SimplexProblem p{{5, 1, 2}, {0.0, 0.5, 0.5}, 2, 100.0};
  auto s = spmin(p);
  EXPECT_EQ(s.p[0], 0.0);
  EXPECT_NEAR(sum(s.p), 1.0, 1e-12);
  auto b = spmin_bisection({{5, 1, 2}, {0.0, 0.5, 0.5}, 1.5, 100.0});
  EXPECT_EQ(b.p[0], 0.0);
}

TEST(KktResidual, DetectsPerturbedSolutions) {
  std::mt19937_64 rng(31);
  int checked = 0;
  while (checked < 50) {
    auto p = random_problem(rng, 2.0);
    p.temperature = 1.0;
    auto s = spmin(p);
    if (s.support.size() < 2 || s.p[s.support[1]] < 0.01) continue;
    auto q = s.p;
    const auto i = s.support[0], j = s.support[1];
    const double shift = 0.01;
    q[i] += shift;
    q[j] -= shift;
    EXPECT_GT(kkt_residual(p, q, s.mu), 1e-3);
    ++checked;
  }
}

TEST(SpminInto, MatchesSpminWithoutValidation) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_problem(rng, trial % 2 ? 2.0 : 2.5);
    std::vector<double> out(p.costs.size());
    const double mu = spmin_into(p.costs, p.reference, p.r, p.temperature, out);
    auto s = spmin(p);
    EXPECT_NEAR(mu, s.mu, 1e-9);
    expect_vector_near(out, s.p, 1e-12);
  }
}
