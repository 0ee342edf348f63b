#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "srsp/graph.hpp"
#include "srsp/policy.hpp"

namespace srsp {

/// (I - P) lambda = c~ + T h~_TS with
/// h~_TS,i = 1/(r-1) sum_j p_ij ((p_ij / ref_ij)^(r-1) - 1).
std::vector<double> tsallis_lagrange_solve(const TransitionMatrix& P, const Graph& g,
                                           const ReferenceMatrix& ref, double r,
                                           Temperature temperature,
                                           const LinearSolverOptions& options = {});

/// Row i <- spmin(c_i + lambda on Succ(i), ref row i, r, T) for every i != target.
TransitionMatrix tsallis_transition_update(std::span<const double> lambda, const Graph& g,
                                           const ReferenceMatrix& ref, double r,
                                           Temperature temperature, NodeId target);

/// Sparse Tsallis-regularized routing policy toward `target`. The returned
/// potential is the Tsallis directed free energy to the target.
Policy tsallis_policy_iterate(const Graph& g, const ReferenceMatrix& ref, NodeId target,
                              double r, Temperature temperature,
                              const PolicyOptions& options = {});

// ---------------------------------------------------------------------------
// Flows

struct NetFlow {
  NodeId from;
  NodeId to;
  double value;
};

/// Expected visits and arc flows of the absorbing walk from `source`.
struct FlowField {
  NodeId source = 0;
  NodeId target = 0;
  std::vector<double> node_visits;
  /// Aligned with Graph::arcs(): n_i p_ij.
  std::vector<double> edge_flows;
  /// max(n_ij - n_ji, 0) oriented along the positive side; one entry per
  /// node pair at most, sorted by (from, to).
  std::vector<NetFlow> net_flows;
};

/// Flow values at or below this are treated as zero when reporting net
/// flows and reached nodes.
inline constexpr double kFlowEpsilon = 1e-12;

FlowField expected_visits(const Policy& policy, const Graph& g, NodeId source,
                          const LinearSolverOptions& options = {});

/// <c>_st = sum over arcs of n_ij c_ij.
double expected_cost(const FlowField& flow, const Graph& g);

/// <c>_it for every start node i with one solve: (I - P)^{-1} c~.
std::vector<double> expected_costs_to_target(const Policy& policy, const Graph& g,
                                             const LinearSolverOptions& options = {});

/// max_j |n_j - sum_i n_i p_ij - delta_sj|.
double conservation_residual(const FlowField& flow, const Policy& policy);

// ---------------------------------------------------------------------------
// Convexity probe

/// Q with q_jl = delta_jl w_j p_j^(r-2) - (w_j p_j^(r-1) + w_l p_l^(r-1))
///               + sum_k w_k p_k^r,   w_j = ref_j^(1-r).
/// Row-block of the Hessian of the flow-form objective, up to r(r-1)/n_i.
std::vector<std::vector<double>> convexity_form(std::span<const double> p,
                                                std::span<const double> ref, double r);

/// Eigenvalues of `convexity_form`, ascending.
std::vector<double> convexity_eigenvalues(std::span<const double> p, std::span<const double> ref,
                                          double r);

struct ConvexityInstance {
  std::vector<double> p;
  std::vector<double> ref;
  double r = 0.0;
};

struct ConvexityReport {
  std::size_t samples = 0;
  /// Smallest lambda_min / lambda_max over all samples.
  double min_relative_eigenvalue = 0.0;
  ConvexityInstance worst_instance;
};

/// Draws `samples` random pairs (p, ref) uniformly on the m-simplex and r
/// uniformly in [r_low, r_high], and tracks the most negative relative
/// eigenvalue of Q.
ConvexityReport convexity_probe(std::size_t m, std::size_t samples, double r_low, double r_high,
                                std::uint64_t seed);

}  // namespace srsp
