#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "srsp/graph.hpp"

namespace srsp {

/// Temperature T of the regularized problem; theta = 1 / T.
class Temperature {
 public:
  static Temperature from_T(double T);
  static Temperature from_theta(double theta);

  double T() const noexcept { return T_; }
  double theta() const noexcept { return 1.0 / T_; }

 private:
  explicit Temperature(double T) : T_(T) {}
  double T_;
};

/// Substochastic transition matrix whose rows are aligned with
/// `Graph::successors`: entry k of row i is the probability of following the
/// k-th outgoing arc of i. Entries for missing edges are structurally zero.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  explicit TransitionMatrix(const Graph& g);
  /// Copy of the reference walk with the target row zeroed.
  TransitionMatrix(const Graph& g, const ReferenceMatrix& ref, NodeId target);

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<double> row(NodeId i) {
    return {values_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> row(NodeId i) const {
    return {values_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const NodeId> columns(NodeId i) const {
    return {columns_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// Entry p_ij, zero when (i, j) is not an arc.
  double at(NodeId i, NodeId j) const;

  /// Number of strictly positive entries.
  std::size_t nonzeros() const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> columns_;
  std::vector<double> values_;
};

/// Regularizer applied per row: KL divergence, or Tsallis r-divergence.
class Divergence {
 public:
  static Divergence kl() { return Divergence(0.0); }
  static Divergence tsallis(double r);

  bool is_kl() const noexcept { return r_ == 0.0; }
  /// Tsallis order; meaningless for KL.
  double r() const noexcept { return r_; }

  /// Divergence of one row from its reference, evaluated in the Bregman form
  /// sum ref_k phi(p_k / ref_k), which assumes both rows sum to one. A zero
  /// row (absorbing node) scores zero.
  double row(std::span<const double> p, std::span<const double> ref) const;

 private:
  explicit Divergence(double r) : r_(r) {}
  double r_;
};

/// H_r(p | ref) = 1/(r-1) * sum p_i ((p_i/ref_i)^(r-1) - 1). Throws if p puts
/// mass where ref has none.
double tsallis_divergence(std::span<const double> p, std::span<const double> ref, double r);
double kl_divergence(std::span<const double> p, std::span<const double> ref);

struct LinearSolverOptions {
  /// Dense LU up to this many nodes; Gauss-Seidel sweeps beyond.
  std::size_t dense_threshold = 2000;
  double iterative_tolerance = 1e-14;
  std::size_t iterative_max_sweeps = 1000000;
};

/// Solve (I - P) x = rhs.
std::vector<double> solve_potential(const TransitionMatrix& P, std::span<const double> rhs,
                                    const LinearSolverOptions& options = {});

/// Solve (I - P)^T n = e_source: expected visits starting from `source`.
std::vector<double> solve_visits(const TransitionMatrix& P, NodeId source,
                                 const LinearSolverOptions& options = {});

/// Fundamental matrix N = (I - P)^{-1}, row s holding the expected visits
/// from source s. Dense only.
std::vector<std::vector<double>> fundamental_matrix(const TransitionMatrix& P);

/// Right-hand side of the potential system: per-node expected arc cost plus
/// T times the row divergence.
std::vector<double> potential_rhs(const TransitionMatrix& P, const Graph& g,
                                  const ReferenceMatrix& ref, double temperature,
                                  const Divergence& divergence);

/// Solve (I - P) lambda = c~ + T h~ for the given divergence.
std::vector<double> lagrange_solve(const TransitionMatrix& P, const Graph& g,
                                   const ReferenceMatrix& ref, double temperature,
                                   const Divergence& divergence,
                                   const LinearSolverOptions& options = {});

/// Expected cost to absorption of the reference walk killed at `target`.
std::vector<double> reference_expected_costs(const Graph& g, const ReferenceMatrix& ref,
                                             NodeId target,
                                             const LinearSolverOptions& options = {});

/// Result of a converged policy iteration. The target row of `transitions`
/// is zero and `potential[target] == 0`.
struct Policy {
  TransitionMatrix transitions;
  NodeId target = 0;
  double temperature = 1.0;
  Divergence divergence = Divergence::kl();
  /// Directed free-energy potential lambda_i toward the target.
  std::vector<double> potential;
  std::size_t iterations = 0;
  bool converged = false;
  /// max_s |primal objective(s) - lambda_s| using the dual iterate that
  /// produced `transitions`; negative when not computed.
  double duality_gap = -1.0;

  double theta() const { return 1.0 / temperature; }
};

struct PolicyOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 10000;
  /// lambda <- w * lambda_new + (1 - w) * lambda_old; 1 disables damping.
  double relaxation = 1.0;
  bool compute_duality_gap = true;
  LinearSolverOptions solver;
};

/// Primal free-energy objective from `source` at policy P:
/// sum over arcs of n_i p_ij (c_ij + T * divergence term).
double primal_objective(const TransitionMatrix& P, const Graph& g, const ReferenceMatrix& ref,
                        double temperature, const Divergence& divergence, NodeId source,
                        const LinearSolverOptions& options = {});

}  // namespace srsp
