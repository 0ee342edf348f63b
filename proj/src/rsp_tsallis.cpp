#include "srsp/rsp_tsallis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "iteration.hpp"
#include "srsp/error.hpp"
#include "srsp/simplex.hpp"

namespace srsp {

std::vector<double> tsallis_lagrange_solve(const TransitionMatrix& P, const Graph& g,
                                           const ReferenceMatrix& ref, double r,
                                           Temperature temperature,
                                           const LinearSolverOptions& options) {
  return lagrange_solve(P, g, ref, temperature.T(), Divergence::tsallis(r), options);
}

TransitionMatrix tsallis_transition_update(std::span<const double> lambda, const Graph& g,
                                           const ReferenceMatrix& ref, double r,
                                           Temperature temperature, NodeId target) {
  if (lambda.size() != g.size())
    throw ValidationError("tsallis_transition_update: size mismatch");
  Divergence::tsallis(r);  // validates r
  TransitionMatrix P(g);
  std::vector<double> augmented;
  for (NodeId i = 0; i < g.size(); ++i) {
    if (i == target) continue;
    auto arcs = g.successors(i);
    augmented.resize(arcs.size());
    for (std::size_t k = 0; k < arcs.size(); ++k)
      augmented[k] = arcs[k].cost + lambda[arcs[k].dst];
    try {
      spmin_into(augmented, ref.row(i), r, temperature.T(), P.row(i));
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("node " + g.name(i) + ": " + e.what(), e.residual());
    }
  }
  return P;
}

Policy tsallis_policy_iterate(const Graph& g, const ReferenceMatrix& ref, NodeId target,
                              double r, Temperature temperature, const PolicyOptions& options) {
  return detail::policy_iterate(
      g, ref, target, temperature, Divergence::tsallis(r), options,
      [&](std::span<const double> lambda) {
        return tsallis_transition_update(lambda, g, ref, r, temperature, target);
      });
}

FlowField expected_visits(const Policy& policy, const Graph& g, NodeId source,
                          const LinearSolverOptions& options) {
  if (source >= g.size()) throw ValidationError("source out of range");
  if (source == policy.target) throw ValidationError("source and target must differ");
  FlowField flow;
  flow.source = source;
  flow.target = policy.target;
  flow.node_visits = solve_visits(policy.transitions, source, options);
  flow.edge_flows.assign(g.arc_count(), 0.0);
  for (NodeId i = 0; i < g.size(); ++i) {
    auto p = policy.transitions.row(i);
    for (std::size_t k = 0; k < p.size(); ++k)
      flow.edge_flows[g.row_offset(i) + k] = flow.node_visits[i] * p[k];
  }

  for (NodeId i = 0; i < g.size(); ++i) {
    auto arcs = g.successors(i);
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      const NodeId j = arcs[k].dst;
      const double forward = flow.edge_flows[g.row_offset(i) + k];
      auto back = g.find_arc(j, i);
      const double backward = back ? flow.edge_flows[*back] : 0.0;
      // Visit each node pair once: from its lower endpoint, or from the only
      // existing direction.
      if (back && j < i) continue;
      const double net = forward - backward;
      if (net > kFlowEpsilon) flow.net_flows.push_back({i, j, net});
      else if (-net > kFlowEpsilon) flow.net_flows.push_back({j, i, -net});
    }
  }
  std::sort(flow.net_flows.begin(), flow.net_flows.end(), [](const NetFlow& a, const NetFlow& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  return flow;
}

double expected_cost(const FlowField& flow, const Graph& g) {
  double total = 0.0;
  auto arcs = g.arcs();
  for (std::size_t k = 0; k < arcs.size(); ++k) total += flow.edge_flows[k] * arcs[k].cost;
  return total;
}

std::vector<double> expected_costs_to_target(const Policy& policy, const Graph& g,
                                             const LinearSolverOptions& options) {
  std::vector<double> arc_cost(g.size(), 0.0);
  for (NodeId i = 0; i < g.size(); ++i) {
    auto p = policy.transitions.row(i);
    auto arcs = g.successors(i);
    for (std::size_t k = 0; k < p.size(); ++k) arc_cost[i] += p[k] * arcs[k].cost;
  }
  auto costs = solve_potential(policy.transitions, arc_cost, options);
  costs[policy.target] = 0.0;
  return costs;
}

double conservation_residual(const FlowField& flow, const Policy& policy) {
  const auto& P = policy.transitions;
  std::vector<double> inflow(P.size(), 0.0);
  for (NodeId i = 0; i < P.size(); ++i) {
    auto cols = P.columns(i);
    auto p = P.row(i);
    for (std::size_t k = 0; k < cols.size(); ++k) inflow[cols[k]] += flow.node_visits[i] * p[k];
  }
  double worst = 0.0;
  for (NodeId j = 0; j < P.size(); ++j) {
    const double delta = j == flow.source ? 1.0 : 0.0;
    worst = std::max(worst, std::abs(flow.node_visits[j] - inflow[j] - delta));
  }
  return worst;
}

std::vector<std::vector<double>> convexity_form(std::span<const double> p,
                                                std::span<const double> ref, double r) {
  const std::size_t m = p.size();
  if (ref.size() != m) throw ValidationError("convexity_form: length mismatch");
  std::vector<double> w(m), wp1(m);
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    w[j] = std::pow(ref[j], 1.0 - r);
    wp1[j] = w[j] * std::pow(p[j], r - 1.0);
    total += wp1[j] * p[j];
  }
  std::vector<std::vector<double>> q(m, std::vector<double>(m));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t l = 0; l < m; ++l)
      q[j][l] = (j == l ? w[j] * std::pow(p[j], r - 2.0) : 0.0) - (wp1[j] + wp1[l]) + total;
  return q;
}

std::vector<double> convexity_eigenvalues(std::span<const double> p, std::span<const double> ref,
                                          double r) {
  auto q = convexity_form(p, ref, r);
  const auto m = static_cast<Eigen::Index>(q.size());
  Eigen::MatrixXd Q(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index l = 0; l < m; ++l)
      Q(j, l) = q[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Q, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

ConvexityReport convexity_probe(std::size_t m, std::size_t samples, double r_low, double r_high,
                                std::uint64_t seed) {
  if (m < 2) throw ValidationError("convexity_probe: dimension must be >= 2");
  if (!(r_low > 1.0) || !(r_high >= r_low))
    throw ValidationError("convexity_probe: need 1 < r_low <= r_high");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> order(r_low, r_high);
  auto draw_simplex = [&] {
    std::vector<double> v(m);
    double total = 0.0;
    for (double& x : v) total += (x = expo(rng));
    for (double& x : v) x /= total;
    return v;
  };

  ConvexityReport report;
  report.samples = samples;
  report.min_relative_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    ConvexityInstance inst{draw_simplex(), draw_simplex(), order(rng)};
    auto ev = convexity_eigenvalues(inst.p, inst.ref, inst.r);
    const double relative = ev.front() / std::abs(ev.back());
    if (relative < report.min_relative_eigenvalue) {
      report.min_relative_eigenvalue = relative;
      report.worst_instance = std::move(inst);
    }
  }
  return report;
}

}  // namespace srsp
