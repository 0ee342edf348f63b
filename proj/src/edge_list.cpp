#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "srsp/error.hpp"
#include "srsp/graph.hpp"

namespace srsp {

namespace {

// Optional comment line fixing the node order: "# nodes: a b c".
constexpr std::string_view kNodesHeader = "# nodes:";

double parse_number(const std::string& token, const std::string& where) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ValidationError(where + ": cannot parse number '" + token + "'");
  return value;
}

}  // namespace

Graph parse_edge_list(std::istream& in, const EdgeListOptions& options,
                      const std::string& source_name) {
  std::unordered_map<std::string, NodeId> index;
  std::vector<std::string> names;
  std::vector<EdgeSpec> edges;

  auto node = [&](const std::string& label) {
    auto [it, inserted] = index.try_emplace(label, names.size());
    if (inserted) names.push_back(label);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line.compare(first, kNodesHeader.size(), kNodesHeader) == 0) {
      std::istringstream decl(line.substr(first + kNodesHeader.size()));
      for (std::string label; decl >> label;) node(label);
      continue;
    }
    if (line[first] == '#') continue;

    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (tokens.size() < 3 || tokens.size() > 4)
      throw ValidationError(where + ": expected 'src dst weight [cost]', got " +
                            std::to_string(tokens.size()) + " columns");

    const double weight = parse_number(tokens[2], where);
    std::optional<double> cost_column;
    if (tokens.size() == 4) cost_column = parse_number(tokens[3], where);

    double affinity = 0.0;
    double cost = 0.0;
    if (options.weight == WeightColumn::Cost) {
      if (cost_column) throw ValidationError(where + ": extra column when weights are costs");
      if (!(weight > 0.0)) throw ValidationError(where + ": cost must be positive to derive affinity");
      cost = weight;
      affinity = 1.0 / weight;
    } else {
      affinity = weight;
      if (cost_column) {
        cost = *cost_column;
      } else if (options.cost_convention == CostConvention::InverseAffinity) {
        if (!(affinity > 0.0)) throw ValidationError(where + ": affinity must be positive");
        cost = 1.0 / affinity;
      } else {
        throw ValidationError(where + ": missing cost column and no cost convention given");
      }
    }
    if (affinity < 0.0) throw ValidationError(where + ": negative affinity");
    if (cost < 0.0) throw ValidationError(where + ": negative cost");
    if (tokens[0] == tokens[1]) throw ValidationError(where + ": self-loop on node " + tokens[0]);

    NodeId u = node(tokens[0]);
    NodeId v = node(tokens[1]);
    edges.push_back({u, v, affinity, cost});
    if (options.undirected) edges.push_back({v, u, affinity, cost});
  }
  if (names.empty()) throw ValidationError(source_name + ": no edges");
  const std::size_t n = names.size();
  return Graph(n, std::move(edges), std::move(names), options.undirected);
}

Graph load_edge_list(const std::string& path, const EdgeListOptions& options) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open edge list '" + path + "'");
  return parse_edge_list(in, options, path);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  std::ostringstream buf;
  buf << std::setprecision(std::numeric_limits<double>::max_digits10);
  buf << kNodesHeader;
  for (const auto& name : g.names()) buf << ' ' << name;
  buf << '\n';
  for (NodeId i = 0; i < g.size(); ++i)
    for (const auto& a : g.successors(i))
      buf << g.name(i) << '\t' << g.name(a.dst) << '\t' << a.affinity << '\t' << a.cost << '\n';
  out << buf.str();
}

}  // namespace srsp
