#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace srsp {

/// Minimize  c'p + T/(r-1) * sum_i p_i ((p_i / ref_i)^(r-1) - 1)
/// over the probability simplex.
///
/// `reference` must be a probability vector; zero entries are allowed and
/// force the matching p_i to zero. `costs` must be finite.
struct SimplexProblem {
  std::vector<double> costs;
  std::vector<double> reference;
  double r = 2.0;
  double temperature = 1.0;

  /// T / (r - 1)
  double upsilon() const { return temperature / (r - 1.0); }
};

struct SimplexSolution {
  std::vector<double> p;
  /// Threshold multiplier: p_i > 0 exactly when costs[i] < mu.
  double mu = 0.0;
  std::vector<std::size_t> support;
  double kkt_residual = 0.0;
};

/// Uniform reference vector of length m.
std::vector<double> uniform_reference(std::size_t m);

/// Dispatches to `spmin_quadratic` for r == 2 and `spmin_bisection` otherwise.
SimplexSolution spmin(const SimplexProblem& problem);

/// Exact linear search for r = 2: sort by cost, sweep the weighted L1 curve
/// until it reaches one, then close-form the threshold on the support.
SimplexSolution spmin_quadratic(const SimplexProblem& problem);

/// Bisection on the threshold mu over [min c, max c + r*Upsilon], valid for
/// every r > 1. Stops when |sum p - 1| <= 1e-12 or the bracket has shrunk to
/// 1e-14 of its initial width; throws ConvergenceError after 200 halvings.
SimplexSolution spmin_bisection(const SimplexProblem& problem);

/// Largest violation of the KKT system for (p, mu):
/// stationarity on the support, [mu - c_i]_+ off it, and |sum p - 1|.
double kkt_residual(const SimplexProblem& problem, std::span<const double> p, double mu);
double kkt_residual(const SimplexProblem& problem, const SimplexSolution& solution);

/// Value of the minimized objective (including the constant -T/(r-1)).
double simplex_objective(const SimplexProblem& problem, std::span<const double> p);

/// Row-level spmin used by policy iteration; writes the solution into `out`
/// (same length as `costs`) and returns mu. No validation beyond sizes.
double spmin_into(std::span<const double> costs, std::span<const double> reference, double r,
                  double temperature, std::span<double> out);

}  // namespace srsp
