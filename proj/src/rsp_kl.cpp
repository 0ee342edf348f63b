#include "srsp/rsp_kl.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "iteration.hpp"
#include "srsp/error.hpp"

namespace srsp {

namespace {

// -(1/theta) log sum_k ref_k exp(-theta x_k), shifted by the minimum.
double softmin(std::span<const double> x, std::span<const double> ref, double theta) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k)
    if (ref[k] > 0.0) lo = std::min(lo, theta * x[k]);
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (ref[k] > 0.0) sum += ref[k] * std::exp(-(theta * x[k] - lo));
  return (lo - std::log(sum)) / theta;
}

}  // namespace

std::vector<double> kl_lagrange_solve(const TransitionMatrix& P, const Graph& g,
                                      const ReferenceMatrix& ref, Temperature temperature,
                                      const LinearSolverOptions& options) {
  return lagrange_solve(P, g, ref, temperature.T(), Divergence::kl(), options);
}

TransitionMatrix kl_transition_update(std::span<const double> lambda, const Graph& g,
                                      const ReferenceMatrix& ref, Temperature temperature,
                                      NodeId target) {
  if (lambda.size() != g.size()) throw ValidationError("kl_transition_update: size mismatch");
  const double theta = temperature.theta();
  TransitionMatrix P(g);
  std::vector<double> logits;
  for (NodeId i = 0; i < g.size(); ++i) {
    if (i == target) continue;
    auto arcs = g.successors(i);
    auto q = ref.row(i);
    auto row = P.row(i);
    logits.resize(arcs.size());
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      logits[k] = theta * (arcs[k].cost + lambda[arcs[k].dst]);
      if (q[k] > 0.0) lo = std::min(lo, logits[k]);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      row[k] = q[k] > 0.0 ? q[k] * std::exp(-(logits[k] - lo)) : 0.0;
      total += row[k];
    }
    for (double& v : row) v /= total;
  }
  return P;
}

Policy kl_policy_iterate(const Graph& g, const ReferenceMatrix& ref, NodeId target,
                         Temperature temperature, const PolicyOptions& options) {
  return detail::policy_iterate(g, ref, target, temperature, Divergence::kl(), options,
                                [&](std::span<const double> lambda) {
                                  return kl_transition_update(lambda, g, ref, temperature, target);
                                });
}

SoftminResult softmin_recursion(const Graph& g, const ReferenceMatrix& ref, NodeId target,
                                Temperature temperature, const PolicyOptions& options) {
  if (target >= g.size()) throw ValidationError("target out of range");
  const double theta = temperature.theta();
  SoftminResult result;
  result.potential.assign(g.size(), 0.0);
  auto& lambda = result.potential;
  std::vector<double> augmented;
  double change = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 1; sweep <= options.max_iterations; ++sweep) {
    change = 0.0;
    for (NodeId i = 0; i < g.size(); ++i) {
      if (i == target) continue;
      auto arcs = g.successors(i);
      augmented.resize(arcs.size());
      for (std::size_t k = 0; k < arcs.size(); ++k)
        augmented[k] = arcs[k].cost + lambda[arcs[k].dst];
      const double v = softmin(augmented, ref.row(i), theta);
      change = std::max(change, std::abs(v - lambda[i]));
      lambda[i] = v;
    }
    if (change <= options.tolerance * (1.0 + detail::max_abs(lambda))) {
      result.sweeps = sweep;
      return result;
    }
  }
  throw ConvergenceError("softmin recursion toward target " + g.name(target) +
                             " did not converge in " + std::to_string(options.max_iterations) +
                             " sweeps",
                         change);
}

}  // namespace srsp
