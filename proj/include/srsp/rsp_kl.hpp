#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "srsp/graph.hpp"
#include "srsp/policy.hpp"

namespace srsp {

/// (I - P) lambda = c~ + T h~_KL with h~_KL,i = sum_j p_ij log(p_ij / ref_ij).
std::vector<double> kl_lagrange_solve(const TransitionMatrix& P, const Graph& g,
                                      const ReferenceMatrix& ref, Temperature temperature,
                                      const LinearSolverOptions& options = {});

/// Gibbs rows p_ij ∝ ref_ij exp(-theta (c_ij + lambda_j)), stabilized by
/// subtracting the row minimum of theta (c + lambda). Row `target` is zero.
TransitionMatrix kl_transition_update(std::span<const double> lambda, const Graph& g,
                                      const ReferenceMatrix& ref, Temperature temperature,
                                      NodeId target);

/// KL-regularized randomized shortest-path policy toward `target`.
/// Throws ConvergenceError past `options.max_iterations`.
Policy kl_policy_iterate(const Graph& g, const ReferenceMatrix& ref, NodeId target,
                         Temperature temperature, const PolicyOptions& options = {});

struct SoftminResult {
  std::vector<double> potential;
  std::size_t sweeps = 0;
};

/// Bellman-Ford-like fixed point
///   lambda_i = -(1/theta) log sum_j ref_ij exp(-theta (c_ij + lambda_j)),
/// Gauss-Seidel sweeps from lambda = 0 with lambda_target pinned to 0.
SoftminResult softmin_recursion(const Graph& g, const ReferenceMatrix& ref, NodeId target,
                                Temperature temperature, const PolicyOptions& options = {});

}  // namespace srsp
