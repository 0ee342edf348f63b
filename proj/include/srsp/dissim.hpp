#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "srsp/graph.hpp"
#include "srsp/policy.hpp"

namespace srsp {

enum class DissimilarityKind { TsallisFE, TsallisRSP, KLFE, KLRSP };

DissimilarityKind parse_dissimilarity_kind(const std::string& text);
const char* to_string(DissimilarityKind kind);

struct DissimilarityParams {
  DissimilarityKind kind = DissimilarityKind::TsallisFE;
  /// Tsallis order; ignored by the KL kinds.
  double r = 2.0;
  double theta = 1.0;
  PolicyOptions policy;
  /// Worker threads across targets; 0 = all cores.
  std::size_t jobs = 1;
};

/// Symmetric, zero-diagonal node dissimilarities.
struct DissimilarityMatrix {
  Eigen::MatrixXd values;
  DissimilarityKind kind = DissimilarityKind::TsallisFE;
  double r = 2.0;
  double theta = 1.0;
  std::vector<std::string> names;
  /// Largest duality gap over the per-target policy solves (-1 if unknown).
  double max_duality_gap = -1.0;
};

/// One policy solve per target t gives column t of the directed quantity:
/// the potential (FE kinds) or the expected cost (RSP kinds). FE kinds
/// average the two directions; RSP kinds add them.
DissimilarityMatrix dissimilarity_matrix(const Graph& g, const ReferenceMatrix& ref,
                                         const DissimilarityParams& params);

struct KernelMatrix {
  Eigen::MatrixXd values;
  /// Share of the absolute spectrum removed by clipping negative eigenvalues.
  double clipped_eigenvalue_mass = 0.0;
};

/// Classical MDS: K = -1/2 H D^(2) H, negative eigenvalues set to zero.
KernelMatrix mds_kernel(const Eigen::MatrixXd& D);

struct TriangleReport {
  std::size_t violations = 0;
  /// min over triples of D_ij + D_jk - D_ik (negative when violated).
  double worst_slack = 0.0;
  std::size_t worst_i = 0, worst_j = 0, worst_k = 0;
};

/// Counts ordered triples with D_ik > D_ij + D_jk + slack.
TriangleReport triangle_check(const Eigen::MatrixXd& D, double slack = 1e-9);

/// CSV with a header row of node names, 12 significant digits.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& M,
                      const std::vector<std::string>& names);
/// Reads a matrix written by write_matrix_csv; fills `names` if non-null.
Eigen::MatrixXd read_matrix_csv(std::istream& in, std::vector<std::string>* names = nullptr);

}  // namespace srsp
