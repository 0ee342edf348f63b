#include "srsp/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "srsp/error.hpp"
#include "srsp/parallel.hpp"

namespace srsp {

Partition Partition::from_labels(const std::vector<std::size_t>& labels) {
  Partition p;
  std::map<std::size_t, std::size_t> remap;
  p.assignment.reserve(labels.size());
  for (std::size_t label : labels) {
    auto [it, inserted] = remap.try_emplace(label, remap.size());
    p.assignment.push_back(it->second);
  }
  p.k = remap.size();
  return p;
}

namespace {

struct Run {
  std::vector<std::size_t> assignment;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  bool complete = false;  // every cluster non-empty
};

// Squared feature-space distance from every point to every cluster mean,
// plus the resulting objective for `assignment`.
Eigen::MatrixXd cluster_distances(const Eigen::MatrixXd& K, const std::vector<std::size_t>& assignment,
                                  std::size_t k) {
  const auto n = K.rows();
  std::vector<double> size(k, 0.0);
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(k));
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto c = static_cast<Eigen::Index>(assignment[static_cast<std::size_t>(j)]);
    size[static_cast<std::size_t>(c)] += 1.0;
    sums.col(c) += K.col(j);
  }
  std::vector<double> self(k, 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto c = assignment[static_cast<std::size_t>(j)];
    self[c] += sums(j, static_cast<Eigen::Index>(c));
  }
  Eigen::MatrixXd dist(n, static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < k; ++c) {
    const auto cc = static_cast<Eigen::Index>(c);
    if (size[c] == 0.0) {
      dist.col(cc).setConstant(std::numeric_limits<double>::infinity());
      continue;
    }
    const double mean_self = self[c] / (size[c] * size[c]);
    for (Eigen::Index i = 0; i < n; ++i)
      dist(i, cc) = std::max(0.0, K(i, i) - 2.0 * sums(i, cc) / size[c] + mean_self);
  }
  return dist;
}

double objective_of(const Eigen::MatrixXd& dist, const std::vector<std::size_t>& assignment) {
  double total = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    total += dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(assignment[i]));
  return total;
}

std::vector<std::size_t> seed_plus_plus(const Eigen::MatrixXd& K, std::size_t k,
                                        std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(K.rows());
  std::vector<std::size_t> centers;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  centers.push_back(pick(rng));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    const auto c = static_cast<Eigen::Index>(centers.back());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      nearest[i] = std::min(nearest[i], std::max(0.0, K(ii, ii) - 2.0 * K(ii, c) + K(c, c)));
      total += nearest[i];
    }
    std::size_t next = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (next = 0; next + 1 < n; ++next) {
        target -= nearest[next];
        if (target <= 0.0 && nearest[next] > 0.0) break;
      }
    } else {
      // All points coincide with a center; take any unchosen point.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i)
        if (std::find(centers.begin(), centers.end(), i) == centers.end()) free.push_back(i);
      std::uniform_int_distribution<std::size_t> any(0, free.size() - 1);
      next = free[any(rng)];
    }
    centers.push_back(next);
  }
  return centers;
}

Run lloyd(const Eigen::MatrixXd& K, std::size_t k, std::size_t max_iterations,
          std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(K.rows());
  auto centers = seed_plus_plus(K, k, rng);

  Run run;
  run.assignment.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const auto cc = static_cast<Eigen::Index>(centers[c]);
      const double d = K(ii, ii) - 2.0 * K(ii, cc) + K(cc, cc);
      if (d < best) {
        best = d;
        run.assignment[i] = c;
      }
    }
  }
  for (std::size_t c = 0; c < k; ++c) run.assignment[centers[c]] = c;

  for (std::size_t it = 0; it < max_iterations; ++it) {
    auto dist = cluster_distances(K, run.assignment, k);
    run.objective = objective_of(dist, run.assignment);
    run.trace.push_back(run.objective);
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      std::size_t best = run.assignment[i];
      for (std::size_t c = 0; c < k; ++c)
        if (dist(ii, static_cast<Eigen::Index>(c)) < dist(ii, static_cast<Eigen::Index>(best)))
          best = c;
      if (best != run.assignment[i]) {
        run.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::vector<bool> used(k, false);
  for (auto c : run.assignment) used[c] = true;
  run.complete = std::all_of(used.begin(), used.end(), [](bool b) { return b; });
  auto dist = cluster_distances(K, run.assignment, k);
  run.objective = objective_of(dist, run.assignment);
  if (run.trace.empty() || run.trace.back() != run.objective) run.trace.push_back(run.objective);
  return run;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& A) { return 0.5 * (A + A.transpose()); }

struct Contingency {
  std::vector<std::vector<double>> table;
  std::vector<double> rows, cols;
  double n = 0.0;
};

Contingency contingency(const Partition& u, const Partition& v) {
  if (u.size() != v.size()) throw ValidationError("partitions cover different node counts");
  if (u.size() == 0) throw ValidationError("empty partitions");
  Contingency c;
  c.table.assign(u.k, std::vector<double>(v.k, 0.0));
  c.rows.assign(u.k, 0.0);
  c.cols.assign(v.k, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    c.table[u.assignment[i]][v.assignment[i]] += 1.0;
    c.rows[u.assignment[i]] += 1.0;
    c.cols[v.assignment[i]] += 1.0;
  }
  c.n = static_cast<double>(u.size());
  return c;
}

bool same_partition(const Contingency& c) {
  for (const auto& row : c.table) {
    const auto nonzero = std::count_if(row.begin(), row.end(), [](double x) { return x > 0.0; });
    if (nonzero > 1) return false;
  }
  for (std::size_t j = 0; j < c.cols.size(); ++j) {
    std::size_t nonzero = 0;
    for (const auto& row : c.table) nonzero += row[j] > 0.0;
    if (nonzero > 1) return false;
  }
  return true;
}

double pairs(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

KMeansResult kernel_kmeans(const Eigen::MatrixXd& K, const KMeansOptions& options) {
  const auto n = static_cast<std::size_t>(K.rows());
  if (K.cols() != K.rows()) throw ValidationError("kernel_kmeans: kernel must be square");
  if (options.k < 2 || options.k > n)
    throw ValidationError("kernel_kmeans: k must lie in [2, n] (k = " + std::to_string(options.k) +
                          ", n = " + std::to_string(n) + ")");
  if (options.restarts == 0) throw ValidationError("kernel_kmeans: restarts must be positive");

  Run best;
  bool best_collapsed = false;
  for (std::size_t restart = 0; restart < options.restarts; ++restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(options.stream), static_cast<std::uint32_t>(options.repetition),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    Run run;
    for (std::size_t attempt = 0; attempt <= options.max_retries; ++attempt) {
      run = lloyd(K, options.k, options.max_iterations, rng);
      if (run.complete) break;
    }
    if (run.objective < best.objective) {
      best_collapsed = !run.complete;
      best = std::move(run);
    }
  }

  KMeansResult result;
  result.partition = Partition::from_labels(best.assignment);
  result.objective = best.objective;
  result.collapsed = best_collapsed;
  result.objective_trace = std::move(best.trace);
  return result;
}

Eigen::MatrixXd affinity_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (NodeId i = 0; i < g.size(); ++i)
    for (const auto& a : g.successors(i))
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a.dst)) = a.affinity;
  return A;
}

double modularity(const Partition& partition, const Eigen::MatrixXd& affinity) {
  if (static_cast<Eigen::Index>(partition.size()) != affinity.rows())
    throw ValidationError("modularity: partition size does not match graph");
  const Eigen::MatrixXd A = symmetrized(affinity);
  const double vol = A.sum();
  if (!(vol > 0.0)) throw ValidationError("modularity: graph has zero volume");
  const Eigen::VectorXd d = A.rowwise().sum();
  double q = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      if (partition.assignment[static_cast<std::size_t>(i)] ==
          partition.assignment[static_cast<std::size_t>(j)])
        q += A(i, j) - d(i) * d(j) / vol;
  return q / vol;
}

double modularity(const Partition& partition, const Graph& g) {
  return modularity(partition, affinity_matrix(g));
}

double nmi(const Partition& u, const Partition& v) {
  auto c = contingency(u, v);
  auto entropy = [&](const std::vector<double>& counts) {
    double h = 0.0;
    for (double x : counts)
      if (x > 0.0) h -= (x / c.n) * std::log(x / c.n);
    return h;
  };
  const double hu = entropy(c.rows);
  const double hv = entropy(c.cols);
  if (hu + hv == 0.0) return 1.0;
  double mi = 0.0;
  for (std::size_t i = 0; i < c.rows.size(); ++i)
    for (std::size_t j = 0; j < c.cols.size(); ++j) {
      const double x = c.table[i][j];
      if (x > 0.0) mi += (x / c.n) * std::log(c.n * x / (c.rows[i] * c.cols[j]));
    }
  return std::clamp(mi / (0.5 * (hu + hv)), 0.0, 1.0);
}

double ari(const Partition& u, const Partition& v) {
  auto c = contingency(u, v);
  double index = 0.0;
  for (const auto& row : c.table)
    for (double x : row) index += pairs(x);
  double a = 0.0, b = 0.0;
  for (double x : c.rows) a += pairs(x);
  for (double x : c.cols) b += pairs(x);
  const double expected = a * b / pairs(c.n);
  const double maximum = 0.5 * (a + b);
  if (maximum == expected) return same_partition(c) ? 1.0 : 0.0;
  return (index - expected) / (maximum - expected);
}

TuneResult tune_parameter(const Graph& g, const ReferenceMatrix& ref, const TuneOptions& options,
                          const std::optional<Partition>& labels) {
  if (options.grid.empty()) throw ValidationError("tune_parameter: empty theta grid");
  if (options.repetitions == 0) throw ValidationError("tune_parameter: repetitions must be positive");
  if (labels && labels->size() != g.size())
    throw ValidationError("tune_parameter: labels do not cover every node");
  const Eigen::MatrixXd affinity = affinity_matrix(g);

  TuneResult result;
  result.has_labels = labels.has_value();
  result.grid.resize(options.grid.size());
  parallel_for(options.grid.size(), options.jobs, [&](std::size_t gi) {
    GridPoint& point = result.grid[gi];
    point.theta = options.grid[gi];
    try {
      DissimilarityParams params;
      params.kind = options.kind;
      params.r = options.r;
      params.theta = point.theta;
      params.policy = options.policy;
      params.policy.compute_duality_gap = false;
      auto D = dissimilarity_matrix(g, ref, params);
      auto K = mds_kernel(D.values);
      point.clipped_eigenvalue_mass = K.clipped_eigenvalue_mass;
      ClusterScores total;
      for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
        KMeansOptions km;
        km.k = options.k;
        km.restarts = options.restarts;
        km.seed = options.seed;
        km.stream = gi;
        km.repetition = rep;
        auto run = kernel_kmeans(K.values, km);
        total.modularity += modularity(run.partition, affinity);
        if (labels) {
          total.nmi += nmi(*labels, run.partition);
          total.ari += ari(*labels, run.partition);
        }
        if (rep == 0) point.partition = std::move(run.partition);
      }
      const double reps = static_cast<double>(options.repetitions);
      point.scores = {total.modularity / reps, total.nmi / reps, total.ari / reps};
      point.ok = true;
    } catch (const std::exception& e) {
      point.error = e.what();
    }
  });

  const GridPoint* best = nullptr;
  for (const auto& point : result.grid) {
    if (!point.ok) {
      std::ostringstream msg;
      msg << "theta " << point.theta << " skipped: " << point.error;
      result.warnings.push_back(msg.str());
      continue;
    }
    if (!best || point.scores.modularity > best->scores.modularity) best = &point;
  }
  if (!best) throw ValidationError("tune_parameter: every grid point failed");
  result.best_theta = best->theta;
  result.partition = best->partition;
  result.scores = best->scores;
  return result;
}

std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("cannot parse grid value '" + s + "'");
    }
  };
  std::vector<double> grid;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const double lo = number(text.substr(0, dots));
    const double hi = number(text.substr(dots + 2));
    if (!(lo > 0.0) || !(hi >= lo)) throw ValidationError("grid range must satisfy 0 < lo <= hi");
    const int first = static_cast<int>(std::lround(std::log10(lo)));
    const int last = static_cast<int>(std::lround(std::log10(hi)));
    for (int e = first; e <= last; ++e) grid.push_back(std::pow(10.0, e));
  } else {
    std::stringstream ss(text);
    for (std::string cell; std::getline(ss, cell, ',');) grid.push_back(number(cell));
  }
  if (grid.empty()) throw ValidationError("empty grid");
  for (double v : grid)
    if (!(v > 0.0)) throw ValidationError("grid values must be positive");
  return grid;
}

Partition load_labels(std::istream& in, const Graph& g) {
  std::vector<std::optional<std::string>> raw(g.size());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string node, label;
    if (!(fields >> node >> label))
      throw ValidationError("labels:" + std::to_string(line_no) + ": expected 'node label'");
    auto id = g.find_node(node);
    if (!id) throw ValidationError("labels:" + std::to_string(line_no) + ": unknown node " + node);
    raw[*id] = label;
  }
  std::map<std::string, std::size_t> ids;
  std::vector<std::size_t> labels;
  for (NodeId i = 0; i < g.size(); ++i) {
    if (!raw[i]) throw ValidationError("labels: node " + g.name(i) + " has no label");
    labels.push_back(ids.try_emplace(*raw[i], ids.size()).first->second);
  }
  return Partition::from_labels(labels);
}

}  // namespace srsp
