#pragma once

// Primal-dual policy iteration shared by the KL and Tsallis solvers.

#include <algorithm>
#include <cmath>
#include <string>

#include "srsp/error.hpp"
#include "srsp/policy.hpp"

namespace srsp::detail {

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Starting from P = P_ref (target row zeroed), alternate
///   lambda <- solve (I - P) lambda = c~ + T h~
///   P      <- update(lambda)
/// until lambda stops moving. `update` fills a TransitionMatrix from lambda.
template <typename Update>
Policy policy_iterate(const Graph& g, const ReferenceMatrix& ref, NodeId target,
                      Temperature temperature, const Divergence& divergence,
                      const PolicyOptions& options, Update&& update) {
  if (target >= g.size()) throw ValidationError("target out of range");
  if (!(options.relaxation > 0.0 && options.relaxation <= 1.0))
    throw ValidationError("relaxation factor must lie in (0, 1]");
  const double T = temperature.T();

  TransitionMatrix P(g, ref, target);
  std::vector<double> previous;
  double delta = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    auto rhs = potential_rhs(P, g, ref, T, divergence);
    auto lambda = solve_potential(P, rhs, options.solver);
    if (!previous.empty() && options.relaxation < 1.0) {
      for (std::size_t i = 0; i < lambda.size(); ++i)
        lambda[i] = options.relaxation * lambda[i] + (1.0 - options.relaxation) * previous[i];
    }
    if (!previous.empty()) {
      delta = 0.0;
      for (std::size_t i = 0; i < lambda.size(); ++i)
        delta = std::max(delta, std::abs(lambda[i] - previous[i]));
      if (delta <= options.tolerance * (1.0 + max_abs(lambda))) {
        Policy policy;
        policy.target = target;
        policy.temperature = T;
        policy.divergence = divergence;
        policy.iterations = it;
        policy.converged = true;
        if (options.compute_duality_gap && g.size() <= options.solver.dense_threshold) {
          // Primal value from every source through the fundamental matrix,
          // compared to the dual iterate that generated P.
          auto N = fundamental_matrix(P);
          double gap = 0.0;
          for (NodeId s = 0; s < g.size(); ++s) {
            double primal = 0.0;
            for (NodeId i = 0; i < g.size(); ++i) primal += N[s][i] * rhs[i];
            gap = std::max(gap, std::abs(primal - previous[s]));
          }
          policy.duality_gap = gap;
        }
        lambda[target] = 0.0;
        policy.potential = std::move(lambda);
        policy.transitions = std::move(P);
        return policy;
      }
    }
    P = update(lambda);
    previous = std::move(lambda);
  }
  throw ConvergenceError("policy iteration toward target " + g.name(target) +
                             " did not converge in " + std::to_string(options.max_iterations) +
                             " iterations",
                         delta);
}

}  // namespace srsp::detail
