#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "srsp/dissim.hpp"
#include "srsp/graph.hpp"

namespace srsp {

/// Hard assignment of nodes to clusters 0..k-1.
struct Partition {
  std::vector<std::size_t> assignment;
  std::size_t k = 0;

  /// Relabels arbitrary ids to 0..k-1 in order of first appearance.
  static Partition from_labels(const std::vector<std::size_t>& labels);
  std::size_t size() const noexcept { return assignment.size(); }
};

struct ClusterScores {
  double modularity = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
};

struct KMeansOptions {
  std::size_t k = 2;
  std::size_t restarts = 30;
  std::uint64_t seed = 0;
  /// Extra words mixed into the RNG stream (grid index, repetition).
  std::uint64_t stream = 0;
  std::uint64_t repetition = 0;
  std::size_t max_iterations = 100;
  /// Reseeding attempts per restart before accepting an empty cluster.
  std::size_t max_retries = 10;
};

struct KMeansResult {
  Partition partition;
  /// Within-cluster sum of squared feature-space distances.
  double objective = 0.0;
  /// True when some restart kept fewer than k clusters after all retries
  /// and that restart won.
  bool collapsed = false;
  /// Objective after every assignment step of the winning restart.
  std::vector<double> objective_trace;
};

/// Lloyd iterations in the feature space of K with k-means++ seeding;
/// the best of `restarts` runs by objective is returned.
KMeansResult kernel_kmeans(const Eigen::MatrixXd& K, const KMeansOptions& options);

/// Dense affinity matrix a_ij of the graph.
Eigen::MatrixXd affinity_matrix(const Graph& g);

/// Q = (1/vol) sum_{i,j same cluster} (a_ij - d_i d_j / vol) on the
/// symmetrized affinities (A + A^T) / 2.
double modularity(const Partition& partition, const Eigen::MatrixXd& affinity);
double modularity(const Partition& partition, const Graph& g);

/// Mutual information over the arithmetic mean of the two entropies.
/// Two single-cluster partitions score 1.
double nmi(const Partition& u, const Partition& v);
/// Hubert-Arabie adjusted Rand index. When the index is undefined (both
/// partitions trivial) it is 1 for identical partitions and 0 otherwise.
double ari(const Partition& u, const Partition& v);

struct TuneOptions {
  DissimilarityKind kind = DissimilarityKind::TsallisFE;
  double r = 2.0;
  std::vector<double> grid;
  std::size_t k = 2;
  std::size_t restarts = 30;
  std::uint64_t seed = 0;
  /// Outer repetitions averaged per grid point (1 = single seeded run).
  std::size_t repetitions = 1;
  std::size_t jobs = 1;
  PolicyOptions policy;
};

struct GridPoint {
  double theta = 0.0;
  bool ok = false;
  std::string error;
  ClusterScores scores;  ///< averaged over repetitions
  Partition partition;   ///< from the first repetition
  double clipped_eigenvalue_mass = 0.0;
};

struct TuneResult {
  double best_theta = 0.0;
  Partition partition;
  ClusterScores scores;
  bool has_labels = false;
  std::vector<GridPoint> grid;
  std::vector<std::string> warnings;
};

/// For each theta: dissimilarity -> MDS kernel -> kernel k-means; keeps the
/// theta with the largest modularity. NMI/ARI are filled when `labels` is
/// given. Failed grid points are skipped with a warning.
TuneResult tune_parameter(const Graph& g, const ReferenceMatrix& ref, const TuneOptions& options,
                          const std::optional<Partition>& labels = std::nullopt);

/// "1e-4..1e5" expands to one value per decade; otherwise a comma list.
std::vector<double> parse_grid(const std::string& text);

/// Two-column `node label` file; nodes not in the graph are an error and
/// every graph node must be labelled.
Partition load_labels(std::istream& in, const Graph& g);

}  // namespace srsp
