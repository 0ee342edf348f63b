#include "srsp/policy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "srsp/error.hpp"

namespace srsp {

namespace {

constexpr double kSingularRcond = 1e-14;

struct Row {
  std::vector<NodeId> cols;
  std::vector<double> vals;
};

std::vector<Row> rows_of(const TransitionMatrix& P, bool transpose) {
  std::vector<Row> rows(P.size());
  for (NodeId i = 0; i < P.size(); ++i) {
    auto cols = P.columns(i);
    auto vals = P.row(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (vals[k] == 0.0) continue;
      Row& dst = rows[transpose ? cols[k] : i];
      dst.cols.push_back(transpose ? i : cols[k]);
      dst.vals.push_back(vals[k]);
    }
  }
  return rows;
}

// Gauss-Seidel on x = b + M x; converges because P is substochastic with an
// absorbing target reachable from every node.
std::vector<double> gauss_seidel(const std::vector<Row>& M, std::span<const double> b,
                                 const LinearSolverOptions& options) {
  std::vector<double> x(b.begin(), b.end());
  double change = 0.0;
  for (std::size_t sweep = 0; sweep < options.iterative_max_sweeps; ++sweep) {
    change = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < M.size(); ++i) {
      double v = b[i];
      for (std::size_t k = 0; k < M[i].cols.size(); ++k) v += M[i].vals[k] * x[M[i].cols[k]];
      change = std::max(change, std::abs(v - x[i]));
      scale = std::max(scale, std::abs(v));
      x[i] = v;
    }
    if (!std::isfinite(change)) break;
    if (change <= options.iterative_tolerance * (1.0 + scale)) return x;
  }
  throw ConvergenceError("iterative linear solve did not converge", change);
}

Eigen::MatrixXd i_minus_p(const TransitionMatrix& P) {
  const auto n = static_cast<Eigen::Index>(P.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  for (NodeId i = 0; i < P.size(); ++i) {
    auto cols = P.columns(i);
    auto vals = P.row(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[k])) -= vals[k];
  }
  return A;
}

Eigen::PartialPivLU<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& A) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rc = lu.rcond();
  if (!(rc > kSingularRcond))
    throw SingularSystemError("(I - P) is singular (rcond " + std::to_string(rc) +
                              "); the target is not absorbing for every node");
  return lu;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// q * phi(p / q), where phi(x) = (x^r - 1 - r (x - 1)) / (r - 1) for Tsallis
// and x log x - x + 1 for KL. Written in terms of d = x - 1 so that rows close
// to the reference keep their relative accuracy.
double bregman_term(const Divergence& d, double p, double ref) {
  const double x = p / ref;
  if (!(x > 0.0)) return ref;
  const double dx = x - 1.0;
  const double log_x = x < 0.5 ? std::log(x) : std::log1p(dx);
  if (d.is_kl()) return ref * (x * log_x - dx);
  const double r = d.r();
  return ref * (std::expm1(r * log_x) - r * dx) / (r - 1.0);
}

}  // namespace

Temperature Temperature::from_T(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("temperature must be finite and > 0");
  return Temperature(T);
}

Temperature Temperature::from_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw ValidationError("theta must be finite and > 0");
  return Temperature(1.0 / theta);
}

TransitionMatrix::TransitionMatrix(const Graph& g)
    : offsets_(g.offsets().begin(), g.offsets().end()), values_(g.arc_count(), 0.0) {
  columns_.reserve(g.arc_count());
  for (const auto& a : g.arcs()) columns_.push_back(a.dst);
}

TransitionMatrix::TransitionMatrix(const Graph& g, const ReferenceMatrix& ref, NodeId target)
    : TransitionMatrix(g) {
  std::copy(ref.values().begin(), ref.values().end(), values_.begin());
  auto t = row(target);
  std::fill(t.begin(), t.end(), 0.0);
}

double TransitionMatrix::at(NodeId i, NodeId j) const {
  auto cols = columns(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[offsets_[i] + static_cast<std::size_t>(it - cols.begin())];
}

std::size_t TransitionMatrix::nonzeros() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return v > 0.0; }));
}

Divergence Divergence::tsallis(double r) {
  if (!(r > 1.0) || !std::isfinite(r)) throw ValidationError("Tsallis order r must be > 1");
  return Divergence(r);
}

double Divergence::row(std::span<const double> p, std::span<const double> ref) const {
  // Equal to sum p f(p / ref) when both rows sum to one; row-sum rounding
  // would otherwise be amplified by large temperatures.
  if (std::none_of(p.begin(), p.end(), [](double v) { return v > 0.0; })) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (ref[k] > 0.0) total += bregman_term(*this, p[k], ref[k]);
  return total;
}

double tsallis_divergence(std::span<const double> p, std::span<const double> ref, double r) {
  if (p.size() != ref.size()) throw ValidationError("tsallis_divergence: length mismatch");
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p[k] > 0.0 && !(ref[k] > 0.0))
      throw ValidationError("tsallis_divergence: p has mass outside the reference support");
  return Divergence::tsallis(r).row(p, ref);
}

double kl_divergence(std::span<const double> p, std::span<const double> ref) {
  if (p.size() != ref.size()) throw ValidationError("kl_divergence: length mismatch");
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p[k] > 0.0 && !(ref[k] > 0.0))
      throw ValidationError("kl_divergence: p has mass outside the reference support");
  return Divergence::kl().row(p, ref);
}

std::vector<double> solve_potential(const TransitionMatrix& P, std::span<const double> rhs,
                                    const LinearSolverOptions& options) {
  if (rhs.size() != P.size()) throw ValidationError("solve_potential: size mismatch");
  if (P.size() > options.dense_threshold) return gauss_seidel(rows_of(P, false), rhs, options);
  auto lu = factorize(i_minus_p(P));
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  return to_vector(lu.solve(b));
}

std::vector<double> solve_visits(const TransitionMatrix& P, NodeId source,
                                 const LinearSolverOptions& options) {
  if (source >= P.size()) throw ValidationError("solve_visits: source out of range");
  std::vector<double> e(P.size(), 0.0);
  e[source] = 1.0;
  if (P.size() > options.dense_threshold) return gauss_seidel(rows_of(P, true), e, options);
  Eigen::MatrixXd At = i_minus_p(P).transpose();
  auto lu = factorize(At);
  Eigen::Map<const Eigen::VectorXd> b(e.data(), static_cast<Eigen::Index>(e.size()));
  return to_vector(lu.solve(b));
}

std::vector<std::vector<double>> fundamental_matrix(const TransitionMatrix& P) {
  auto lu = factorize(i_minus_p(P));
  Eigen::MatrixXd N = lu.inverse();
  std::vector<std::vector<double>> rows(P.size());
  for (Eigen::Index s = 0; s < N.rows(); ++s) {
    Eigen::VectorXd r = N.row(s).transpose();
    rows[static_cast<std::size_t>(s)] = to_vector(r);
  }
  return rows;
}

std::vector<double> potential_rhs(const TransitionMatrix& P, const Graph& g,
                                  const ReferenceMatrix& ref, double temperature,
                                  const Divergence& divergence) {
  std::vector<double> rhs(g.size(), 0.0);
  for (NodeId i = 0; i < g.size(); ++i) {
    auto p = P.row(i);
    auto arcs = g.successors(i);
    double expected_cost = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k)
      if (p[k] > 0.0) expected_cost += p[k] * arcs[k].cost;
    rhs[i] = expected_cost + temperature * divergence.row(p, ref.row(i));
  }
  return rhs;
}

std::vector<double> lagrange_solve(const TransitionMatrix& P, const Graph& g,
                                   const ReferenceMatrix& ref, double temperature,
                                   const Divergence& divergence,
                                   const LinearSolverOptions& options) {
  return solve_potential(P, potential_rhs(P, g, ref, temperature, divergence), options);
}

std::vector<double> reference_expected_costs(const Graph& g, const ReferenceMatrix& ref,
                                             NodeId target, const LinearSolverOptions& options) {
  TransitionMatrix P(g, ref, target);
  return lagrange_solve(P, g, ref, 1.0, Divergence::kl(), options);
}

double primal_objective(const TransitionMatrix& P, const Graph& g, const ReferenceMatrix& ref,
                        double temperature, const Divergence& divergence, NodeId source,
                        const LinearSolverOptions& options) {
  auto visits = solve_visits(P, source, options);
  double total = 0.0;
  for (NodeId i = 0; i < g.size(); ++i) {
    auto p = P.row(i);
    auto arcs = g.successors(i);
    double expected = 0.0;
    bool moves = false;
    for (std::size_t k = 0; k < p.size(); ++k) {
      expected += p[k] * arcs[k].cost;
      moves = moves || p[k] > 0.0;
    }
    if (moves) total += visits[i] * (expected + temperature * divergence.row(p, ref.row(i)));
  }
  return total;
}

}  // namespace srsp
