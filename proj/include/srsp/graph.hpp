#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace srsp {

using NodeId = std::size_t;

/// Outgoing arc stored in the compressed row layout of a Graph.
struct Arc {
  NodeId dst;
  double affinity;
  double cost;
};

/// Input record for building a Graph.
struct EdgeSpec {
  NodeId src;
  NodeId dst;
  double affinity;
  double cost;
};

/// Weighted directed graph with per-arc affinity and cost.
///
/// Arcs are kept in compressed sparse rows sorted by destination, so the
/// position of an arc inside `successors(i)` is a stable index shared by
/// every row-aligned structure (reference matrix, policies, flows).
///
/// Construction validates: no self-loops, strictly positive affinity,
/// non-negative finite cost, no duplicate arcs, strong connectivity.
/// Instances are immutable afterwards.
class Graph {
 public:
  Graph(std::size_t n, std::vector<EdgeSpec> edges,
        std::vector<std::string> names = {}, bool expanded_from_undirected = false);

  std::size_t size() const noexcept { return offsets_.size() - 1; }
  std::size_t arc_count() const noexcept { return arcs_.size(); }

  std::span<const Arc> successors(NodeId i) const {
    return {arcs_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  /// Offset of row i inside the flat arc array.
  std::size_t row_offset(NodeId i) const { return offsets_[i]; }
  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const Arc> arcs() const noexcept { return arcs_; }

  /// Index of arc (i, j) in the flat arc array, if present.
  std::optional<std::size_t> find_arc(NodeId i, NodeId j) const;

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(NodeId i) const { return names_[i]; }
  std::optional<NodeId> find_node(const std::string& name) const;

  bool expanded_from_undirected() const noexcept { return undirected_; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Arc> arcs_;
  std::vector<std::string> names_;
  bool undirected_;
};

enum class ReferenceKind { Natural, Uniform };

/// Reference random walk. `row(i)` is aligned with `graph.successors(i)`.
/// Rows are not zeroed for any target; policies do that themselves.
class ReferenceMatrix {
 public:
  ReferenceMatrix(const Graph& g, ReferenceKind kind);

  ReferenceKind kind() const noexcept { return kind_; }
  std::span<const double> row(NodeId i) const {
    return {values_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> values() const noexcept { return values_; }

 private:
  ReferenceKind kind_;
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
};

ReferenceMatrix reference_probabilities(const Graph& g, ReferenceKind kind);

/// Dijkstra on arc costs.
double shortest_path_cost(const Graph& g, NodeId source, NodeId target);

/// Least cost from every node to `target` (Dijkstra on the reversed graph).
std::vector<double> shortest_path_costs_to(const Graph& g, NodeId target);

// ---------------------------------------------------------------------------
// Edge-list ingestion

/// How the third column is read.
enum class WeightColumn {
  Affinity,  ///< column is a_ij; an optional fourth column holds c_ij
  Cost,      ///< column is c_ij and a_ij = 1 / c_ij
};

/// How a missing cost column is filled when the weight column is an affinity.
enum class CostConvention {
  FromColumn,       ///< the fourth column is mandatory
  InverseAffinity,  ///< c_ij = 1 / a_ij
};

struct EdgeListOptions {
  bool undirected = false;
  WeightColumn weight = WeightColumn::Affinity;
  /// Unset means a missing cost column is an error.
  std::optional<CostConvention> cost_convention;
};

Graph parse_edge_list(std::istream& in, const EdgeListOptions& options,
                      const std::string& source_name = "<stream>");
Graph load_edge_list(const std::string& path, const EdgeListOptions& options);

/// Canonical form: one directed arc per line, `src dst affinity cost`,
/// rows in node order, values printed with round-trip precision.
void write_edge_list(std::ostream& out, const Graph& g);

ReferenceKind parse_reference_kind(const std::string& text);
const char* to_string(ReferenceKind kind);

}  // namespace srsp
