#include "srsp/dissim.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "srsp/error.hpp"
#include "srsp/parallel.hpp"
#include "srsp/rsp_kl.hpp"
#include "srsp/rsp_tsallis.hpp"

namespace srsp {

DissimilarityKind parse_dissimilarity_kind(const std::string& text) {
  if (text == "tsallis-fe") return DissimilarityKind::TsallisFE;
  if (text == "tsallis-rsp") return DissimilarityKind::TsallisRSP;
  if (text == "kl-fe") return DissimilarityKind::KLFE;
  if (text == "kl-rsp") return DissimilarityKind::KLRSP;
  throw ValidationError("unknown dissimilarity kind '" + text +
                        "' (expected tsallis-fe|tsallis-rsp|kl-fe|kl-rsp)");
}

const char* to_string(DissimilarityKind kind) {
  switch (kind) {
    case DissimilarityKind::TsallisFE: return "tsallis-fe";
    case DissimilarityKind::TsallisRSP: return "tsallis-rsp";
    case DissimilarityKind::KLFE: return "kl-fe";
    case DissimilarityKind::KLRSP: return "kl-rsp";
  }
  return "?";
}

DissimilarityMatrix dissimilarity_matrix(const Graph& g, const ReferenceMatrix& ref,
                                         const DissimilarityParams& params) {
  const bool tsallis = params.kind == DissimilarityKind::TsallisFE ||
                       params.kind == DissimilarityKind::TsallisRSP;
  const bool free_energy = params.kind == DissimilarityKind::TsallisFE ||
                           params.kind == DissimilarityKind::KLFE;
  const auto temperature = Temperature::from_theta(params.theta);
  if (tsallis) Divergence::tsallis(params.r);

  const std::size_t n = g.size();
  // directed(s, t): quantity from s toward target t.
  Eigen::MatrixXd directed = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                   static_cast<Eigen::Index>(n));
  std::vector<double> gaps(n, -1.0);
  parallel_for(n, params.jobs, [&](std::size_t t) {
    Policy policy = tsallis ? tsallis_policy_iterate(g, ref, t, params.r, temperature, params.policy)
                            : kl_policy_iterate(g, ref, t, temperature, params.policy);
    gaps[t] = policy.duality_gap;
    const auto column = free_energy ? policy.potential
                                    : expected_costs_to_target(policy, g, params.policy.solver);
    for (std::size_t s = 0; s < n; ++s)
      directed(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = column[s];
  });

  DissimilarityMatrix result;
  result.kind = params.kind;
  result.r = params.r;
  result.theta = params.theta;
  result.names = g.names();
  result.values = free_energy ? Eigen::MatrixXd(0.5 * (directed + directed.transpose()))
                              : Eigen::MatrixXd(directed + directed.transpose());
  result.values.diagonal().setZero();
  for (double gap : gaps) result.max_duality_gap = std::max(result.max_duality_gap, gap);
  return result;
}

KernelMatrix mds_kernel(const Eigen::MatrixXd& D) {
  const auto n = D.rows();
  if (D.cols() != n) throw ValidationError("mds_kernel: matrix must be square");
  KernelMatrix kernel;
  if (n == 0) return kernel;
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n) -
                      Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd B = -0.5 * H * D.cwiseProduct(D) * H;
  B = 0.5 * (B + B.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
  Eigen::VectorXd values = eig.eigenvalues();
  const double total = values.cwiseAbs().sum();
  double clipped = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values(i) < 0.0) {
      clipped += -values(i);
      values(i) = 0.0;
    }
  }
  kernel.values = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  kernel.values = 0.5 * (kernel.values + kernel.values.transpose()).eval();
  kernel.clipped_eigenvalue_mass = total > 0.0 ? clipped / total : 0.0;
  return kernel;
}

TriangleReport triangle_check(const Eigen::MatrixXd& D, double slack) {
  const auto n = D.rows();
  if (D.cols() != n) throw ValidationError("triangle_check: matrix must be square");
  TriangleReport report;
  report.worst_slack = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        const double s = D(i, j) + D(j, k) - D(i, k);
        if (s < -slack) ++report.violations;
        if (s < report.worst_slack) {
          report.worst_slack = s;
          report.worst_i = static_cast<std::size_t>(i);
          report.worst_j = static_cast<std::size_t>(j);
          report.worst_k = static_cast<std::size_t>(k);
        }
      }
  if (n < 3) report.worst_slack = 0.0;
  return report;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& M,
                      const std::vector<std::string>& names) {
  if (names.size() != static_cast<std::size_t>(M.cols()))
    throw ValidationError("write_matrix_csv: name count does not match column count");
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", M(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(std::istream& in, std::vector<std::string>* names) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("matrix CSV is empty");
  auto header = split(line);
  const std::size_t n = header.size();
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cells = split(line);
    if (cells.size() != n)
      throw ValidationError("matrix CSV row " + std::to_string(rows.size() + 2) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(n));
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw ValidationError("matrix CSV: cannot parse '" + c + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != n) throw ValidationError("matrix CSV is not square");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  if (names) *names = std::move(header);
  return M;
}

}  // namespace srsp
