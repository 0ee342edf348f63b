#include "srsp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

#include "srsp/error.hpp"

namespace srsp {

namespace {

std::vector<bool> reachable(std::size_t n, NodeId start,
                            const std::vector<std::vector<NodeId>>& adjacency) {
  std::vector<bool> seen(n, false);
  std::vector<NodeId> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace

Graph::Graph(std::size_t n, std::vector<EdgeSpec> edges, std::vector<std::string> names,
             bool expanded_from_undirected)
    : undirected_(expanded_from_undirected) {
  if (n == 0) throw ValidationError("graph has no nodes");
  if (names.empty()) {
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  } else if (names.size() != n) {
    throw ValidationError("node name count does not match node count");
  }
  names_ = std::move(names);

  auto label = [this](NodeId i) { return names_[i]; };
  for (const auto& e : edges) {
    if (e.src >= n || e.dst >= n) throw ValidationError("edge endpoint out of range");
    const std::string where = "edge (" + label(e.src) + ", " + label(e.dst) + ")";
    if (e.src == e.dst) throw ValidationError("self-loop on node " + label(e.src));
    if (!(e.affinity > 0.0) || !std::isfinite(e.affinity))
      throw ValidationError(where + ": affinity must be positive and finite");
    if (!(e.cost >= 0.0) || !std::isfinite(e.cost))
      throw ValidationError(where + ": cost must be non-negative and finite");
  }

  std::sort(edges.begin(), edges.end(), [](const EdgeSpec& a, const EdgeSpec& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].src == edges[k - 1].src && edges[k].dst == edges[k - 1].dst)
      throw ValidationError("duplicate edge (" + label(edges[k].src) + ", " +
                            label(edges[k].dst) + ")");
  }

  offsets_.assign(n + 1, 0);
  arcs_.reserve(edges.size());
  for (const auto& e : edges) {
    ++offsets_[e.src + 1];
    arcs_.push_back({e.dst, e.affinity, e.cost});
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];

  if (n == 1) return;
  std::vector<std::vector<NodeId>> forward(n), backward(n);
  for (const auto& e : edges) {
    forward[e.src].push_back(e.dst);
    backward[e.dst].push_back(e.src);
  }
  auto fwd = reachable(n, 0, forward);
  auto bwd = reachable(n, 0, backward);
  for (NodeId i = 0; i < n; ++i) {
    if (!fwd[i] || !bwd[i])
      throw ValidationError("graph is not strongly connected (node " + label(i) +
                            (fwd[i] ? " cannot reach " : " is unreachable from ") + label(0) +
                            ")");
  }
}

std::optional<std::size_t> Graph::find_arc(NodeId i, NodeId j) const {
  auto row = successors(i);
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const Arc& a, NodeId v) { return a.dst < v; });
  if (it == row.end() || it->dst != j) return std::nullopt;
  return offsets_[i] + static_cast<std::size_t>(it - row.begin());
}

std::optional<NodeId> Graph::find_node(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<NodeId>(it - names_.begin());
}

ReferenceMatrix::ReferenceMatrix(const Graph& g, ReferenceKind kind)
    : kind_(kind), offsets_(g.offsets().begin(), g.offsets().end()), values_(g.arc_count()) {
  for (NodeId i = 0; i < g.size(); ++i) {
    auto row = g.successors(i);
    if (row.empty()) throw ValidationError("node " + g.name(i) + " has no successor");
    double total = 0.0;
    for (const auto& a : row) total += kind == ReferenceKind::Natural ? a.affinity : 1.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      double w = kind == ReferenceKind::Natural ? row[k].affinity : 1.0;
      values_[offsets_[i] + k] = w / total;
    }
  }
}

ReferenceMatrix reference_probabilities(const Graph& g, ReferenceKind kind) {
  return ReferenceMatrix(g, kind);
}

std::vector<double> shortest_path_costs_to(const Graph& g, NodeId target) {
  const std::size_t n = g.size();
  if (target >= n) throw ValidationError("target out of range");
  std::vector<std::vector<std::pair<NodeId, double>>> reversed(n);
  for (NodeId i = 0; i < n; ++i)
    for (const auto& a : g.successors(i)) reversed[a.dst].emplace_back(i, a.cost);

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[target] = 0.0;
  heap.emplace(0.0, target);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (auto [v, c] : reversed[u]) {
      if (d + c < dist[v]) {
        dist[v] = d + c;
        heap.emplace(dist[v], v);
      }
    }
  }
  return dist;
}

double shortest_path_cost(const Graph& g, NodeId source, NodeId target) {
  if (source >= g.size()) throw ValidationError("source out of range");
  if (source == target) throw ValidationError("source and target must differ");
  double d = shortest_path_costs_to(g, target)[source];
  if (!std::isfinite(d))
    throw ValidationError("target " + g.name(target) + " unreachable from " + g.name(source));
  return d;
}

ReferenceKind parse_reference_kind(const std::string& text) {
  if (text == "natural") return ReferenceKind::Natural;
  if (text == "uniform") return ReferenceKind::Uniform;
  throw ValidationError("unknown reference kind '" + text + "' (expected natural|uniform)");
}

const char* to_string(ReferenceKind kind) {
  return kind == ReferenceKind::Natural ? "natural" : "uniform";
}

}  // namespace srsp
