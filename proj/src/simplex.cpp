#include "srsp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "srsp/error.hpp"

namespace srsp {

namespace {

constexpr double kBisectionTolerance = 1e-12;
constexpr double kBisectionWidthFactor = 1e-14;
constexpr int kBisectionMaxIterations = 200;

// Indices with a positive reference weight, sorted by (cost, index).
std::vector<std::size_t> active_by_cost(std::span<const double> costs,
                                        std::span<const double> reference) {
  std::vector<std::size_t> order;
  order.reserve(costs.size());
  for (std::size_t i = 0; i < costs.size(); ++i)
    if (reference[i] > 0.0) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return costs[a] != costs[b] ? costs[a] < costs[b] : a < b;
  });
  return order;
}

void normalize(std::span<double> p) {
  double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
}

// p_i = ref_i * ((mu - c_i) / (r Upsilon))^(1/(r-1)) on mu > c_i.
double p_at(double mu, double cost, double ref, double r_upsilon, double inv_exponent) {
  double gap = mu - cost;
  if (gap <= 0.0) return 0.0;
  return ref * std::pow(gap / r_upsilon, inv_exponent);
}

double single_entry(std::span<const double> costs, std::span<const double> reference,
                    std::size_t only, double r, double temperature, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  out[only] = 1.0;
  const double r_upsilon = r * temperature / (r - 1.0);
  return costs[only] + r_upsilon * std::pow(1.0 / reference[only], r - 1.0);
}

double quadratic_into(std::span<const double> costs, std::span<const double> reference,
                      double temperature, std::span<double> out) {
  auto order = active_by_cost(costs, reference);
  if (order.size() == 1) return single_entry(costs, reference, order[0], 2.0, temperature, out);

  // Weighted sweep: L1(k) = (c_(k) W_k - S_k) / 2T with W, S prefix sums of
  // ref and ref*c. L1 is non-decreasing; the support is the longest prefix
  // with L1 < 1.
  const double two_t = 2.0 * temperature;
  double weight = 0.0;
  double weighted_cost = 0.0;
  std::size_t support = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double c = costs[order[k]];
    const double w = reference[order[k]];
    const double l1 = (c * (weight + w) - (weighted_cost + w * c)) / two_t;
    if (k > 0 && l1 >= 1.0) break;
    weight += w;
    weighted_cost += w * c;
    support = k + 1;
  }
  const double mu = (two_t + weighted_cost) / weight;

  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < support; ++k) {
    const std::size_t i = order[k];
    out[i] = std::max(0.0, reference[i] * (mu - costs[i]) / two_t);
  }
  normalize(out);
  return mu;
}

double bisection_into(std::span<const double> costs, std::span<const double> reference,
                      double r, double temperature, std::span<double> out) {
  auto order = active_by_cost(costs, reference);
  if (order.size() == 1) return single_entry(costs, reference, order[0], r, temperature, out);

  const double r_upsilon = r * temperature / (r - 1.0);
  const double inv_exponent = 1.0 / (r - 1.0);
  auto l1 = [&](double mu) {
    double total = 0.0;
    for (std::size_t i : order) total += p_at(mu, costs[i], reference[i], r_upsilon, inv_exponent);
    return total;
  };

  double lo = costs[order.front()];
  double hi = costs[order.back()] + r_upsilon;
  const double width = hi - lo;
  double mu = 0.5 * (lo + hi);
  double residual = std::abs(l1(mu) - 1.0);
  bool done = false;
  for (int it = 0; it < kBisectionMaxIterations; ++it) {
    mu = 0.5 * (lo + hi);
    const double excess = l1(mu) - 1.0;
    residual = std::abs(excess);
    if (std::isnan(excess)) break;
    if (residual <= kBisectionTolerance || hi - lo <= kBisectionWidthFactor * width) {
      done = true;
      break;
    }
    (excess < 0.0 ? lo : hi) = mu;
  }
  if (!done)
    throw ConvergenceError("spmin bisection did not converge (bracket [" + std::to_string(lo) +
                               ", " + std::to_string(hi) + "])",
                           residual);

  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i : order) out[i] = p_at(mu, costs[i], reference[i], r_upsilon, inv_exponent);
  normalize(out);
  return mu;
}

void validate(const SimplexProblem& problem) {
  const auto m = problem.costs.size();
  if (m == 0) throw ValidationError("spmin: empty cost vector");
  if (problem.reference.size() != m)
    throw ValidationError("spmin: reference length " + std::to_string(problem.reference.size()) +
                          " does not match cost length " + std::to_string(m));
  if (!(problem.r > 1.0) || !std::isfinite(problem.r))
    throw ValidationError("spmin: r must be finite and > 1");
  if (!(problem.temperature > 0.0) || !std::isfinite(problem.temperature))
    throw ValidationError("spmin: temperature must be finite and > 0");
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(problem.costs[i]))
      throw ValidationError("spmin: cost " + std::to_string(i) + " is not finite");
    if (!(problem.reference[i] >= 0.0))
      throw ValidationError("spmin: reference entry " + std::to_string(i) + " is negative");
    total += problem.reference[i];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ValidationError("spmin: reference probabilities sum to " + std::to_string(total));
}

SimplexSolution finish(const SimplexProblem& problem, std::vector<double> p, double mu) {
  SimplexSolution s;
  s.p = std::move(p);
  s.mu = mu;
  for (std::size_t i = 0; i < s.p.size(); ++i)
    if (s.p[i] > 0.0) s.support.push_back(i);
  s.kkt_residual = kkt_residual(problem, s.p, mu);
  return s;
}

}  // namespace

std::vector<double> uniform_reference(std::size_t m) {
  return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

double spmin_into(std::span<const double> costs, std::span<const double> reference, double r,
                  double temperature, std::span<double> out) {
  if (r == 2.0) return quadratic_into(costs, reference, temperature, out);
  return bisection_into(costs, reference, r, temperature, out);
}

SimplexSolution spmin(const SimplexProblem& problem) {
  return problem.r == 2.0 ? spmin_quadratic(problem) : spmin_bisection(problem);
}

SimplexSolution spmin_quadratic(const SimplexProblem& problem) {
  validate(problem);
  if (problem.r != 2.0) throw ValidationError("spmin_quadratic requires r = 2");
  std::vector<double> p(problem.costs.size());
  double mu = quadratic_into(problem.costs, problem.reference, problem.temperature, p);
  return finish(problem, std::move(p), mu);
}

SimplexSolution spmin_bisection(const SimplexProblem& problem) {
  validate(problem);
  std::vector<double> p(problem.costs.size());
  double mu = bisection_into(problem.costs, problem.reference, problem.r, problem.temperature, p);
  return finish(problem, std::move(p), mu);
}

double kkt_residual(const SimplexProblem& problem, std::span<const double> p, double mu) {
  const double r_upsilon = problem.r * problem.upsilon();
  double worst = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    total += p[i];
    const double ref = problem.reference[i];
    const double c = problem.costs[i];
    if (ref <= 0.0) {
      worst = std::max(worst, std::abs(p[i]));
    } else if (p[i] > 0.0) {
      worst = std::max(worst, std::abs(c + r_upsilon * std::pow(p[i] / ref, problem.r - 1.0) - mu));
    } else {
      worst = std::max(worst, std::max(mu - c, 0.0));
    }
    if (p[i] < 0.0) worst = std::max(worst, -p[i]);
  }
  return std::max(worst, std::abs(total - 1.0));
}

double kkt_residual(const SimplexProblem& problem, const SimplexSolution& solution) {
  return kkt_residual(problem, solution.p, solution.mu);
}

double simplex_objective(const SimplexProblem& problem, std::span<const double> p) {
  double expected = 0.0;
  double divergence = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    expected += problem.costs[i] * p[i];
    const double ref = problem.reference[i];
    if (ref > 0.0 && p[i] > 0.0) divergence += p[i] * std::pow(p[i] / ref, problem.r - 1.0);
  }
  return expected + problem.upsilon() * (divergence - 1.0);
}

}  // namespace srsp
