#include "srsp/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "srsp/cluster.hpp"
#include "srsp/dissim.hpp"
#include "srsp/error.hpp"
#include "srsp/graph.hpp"
#include "srsp/parallel.hpp"
#include "srsp/rsp_kl.hpp"
#include "srsp/rsp_tsallis.hpp"
#include "srsp/simplex.hpp"

#ifndef SRSP_VERSION
#define SRSP_VERSION "0.0.0"
#endif

namespace srsp::cli {

using nlohmann::ordered_json;

const char* version() { return SRSP_VERSION; }

namespace {

constexpr const char* kSchemaPrefix = "srsp.";
constexpr int kSchemaVersion = 1;

std::string schema(const std::string& name) {
  return kSchemaPrefix + name + "/" + std::to_string(kSchemaVersion);
}

// Options shared by every subcommand that reads a graph.
struct GraphArgs {
  std::string path;
  bool undirected = false;
  std::string weight = "affinity";
  std::string cost;
  std::string ref = "natural";

  void attach(CLI::App* app) {
    app->add_option("--graph", path, "Edge list: src dst weight [cost]")->required();
    app->add_flag("--undirected", undirected, "Insert every edge in both directions");
    app->add_option("--weight", weight, "Meaning of the third column")
        ->check(CLI::IsMember({"affinity", "cost"}));
    app->add_option("--cost", cost, "Cost source when the weight column is an affinity")
        ->check(CLI::IsMember({"column", "inverse-affinity"}));
    app->add_option("--ref", ref, "Reference random walk")->check(CLI::IsMember({"natural", "uniform"}));
  }

  Graph load() const {
    EdgeListOptions options;
    options.undirected = undirected;
    options.weight = weight == "cost" ? WeightColumn::Cost : WeightColumn::Affinity;
    if (cost == "column") options.cost_convention = CostConvention::FromColumn;
    if (cost == "inverse-affinity") options.cost_convention = CostConvention::InverseAffinity;
    return load_edge_list(path, options);
  }
};

struct SolverArgs {
  double tolerance = 1e-10;
  std::size_t max_iterations = 10000;
  double relaxation = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--tol", tolerance, "Relative convergence tolerance on lambda")
        ->check(CLI::PositiveNumber);
    app->add_option("--max-iter", max_iterations, "Iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--relaxation", relaxation, "Lambda relaxation factor in (0, 1]")
        ->check(CLI::Range(1e-12, 1.0));
  }

  PolicyOptions options() const {
    PolicyOptions o;
    o.tolerance = tolerance;
    o.max_iterations = max_iterations;
    o.relaxation = relaxation;
    return o;
  }
};

struct JsonSink {
  std::string path;
  bool requested = false;

  void attach(CLI::App* app, const std::string& flag, const std::string& help) {
    app->add_option(flag, path, help)->expected(0, 1);
  }

  void write(const ordered_json& doc, std::ostream& out) const {
    if (path.empty() || path == "-") {
      out << doc.dump(2) << '\n';
      return;
    }
    std::ofstream file(path);
    if (!file) throw ValidationError("cannot open output file " + path);
    file << doc.dump(2) << '\n';
  }
};

NodeId node_flag(const Graph& g, const std::string& flag, const std::string& name) {
  auto id = g.find_node(name);
  if (!id) throw ValidationError(flag + ": unknown node '" + name + "'");
  return *id;
}

std::vector<double> parse_vector(const std::string& flag, const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  for (std::string cell; std::getline(ss, cell, ',');) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ValidationError(flag + ": cannot parse '" + cell + "' as a number");
    }
  }
  if (values.empty()) throw ValidationError(flag + ": empty list");
  return values;
}

ordered_json names_to_values(const Graph& g, const std::vector<double>& values) {
  ordered_json obj = ordered_json::object();
  for (NodeId i = 0; i < g.size(); ++i) obj[g.name(i)] = values[i];
  return obj;
}

std::string fixed3(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << v;
  return s.str();
}

std::string quoted(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c;
  }
  return q + '"';
}

void write_dot(std::ostream& out, const Graph& g, const FlowField& flow) {
  out << "digraph flow {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (NodeId i = 0; i < g.size(); ++i) {
    out << "  " << quoted(g.name(i));
    if (flow.node_visits[i] <= kFlowEpsilon) out << " [color=gray, fontcolor=gray]";
    else if (i == flow.source || i == flow.target) out << " [style=bold]";
    out << ";\n";
  }
  for (const auto& f : flow.net_flows)
    out << "  " << quoted(g.name(f.from)) << " -> " << quoted(g.name(f.to)) << " [label="
        << quoted(fixed3(f.value)) << "];\n";
  out << "}\n";
}

Policy solve_policy(const Graph& g, const ReferenceMatrix& ref, NodeId target,
                    const std::string& divergence, double r, double theta,
                    const PolicyOptions& options) {
  const auto temperature = Temperature::from_theta(theta);
  if (divergence == "kl") return kl_policy_iterate(g, ref, target, temperature, options);
  return tsallis_policy_iterate(g, ref, target, r, temperature, options);
}

// ---------------------------------------------------------------------------

struct SpminCommand {
  std::string costs;
  std::string ref = "uniform";
  double r = 2.0;
  double T = 1.0;
  JsonSink json;

  void attach(CLI::App* app) {
    app->add_option("--costs", costs, "Comma-separated costs")->required();
    app->add_option("--ref", ref, "'uniform' or comma-separated reference probabilities");
    app->add_option("--r", r, "Tsallis order, r > 1");
    app->add_option("--T", T, "Temperature, T > 0");
    json.attach(app, "--json", "Write JSON to this file (stdout when omitted)");
  }

  SimplexProblem problem() const {
    if (!(r > 1.0)) throw ValidationError("--r: must be greater than 1");
    if (!(T > 0.0)) throw ValidationError("--T: must be positive");
    SimplexProblem p;
    p.costs = parse_vector("--costs", costs);
    p.reference = ref == "uniform" ? uniform_reference(p.costs.size()) : parse_vector("--ref", ref);
    if (p.reference.size() != p.costs.size())
      throw ValidationError("--ref: length " + std::to_string(p.reference.size()) +
                            " does not match --costs length " + std::to_string(p.costs.size()));
    p.r = r;
    p.temperature = T;
    return p;
  }

  int run(std::ostream& out, std::ostream& err) const {
    const auto p = problem();
    const auto sol = spmin(p);
    ordered_json doc;
    doc["schema"] = schema("spmin");
    doc["r"] = p.r;
    doc["T"] = p.temperature;
    doc["p"] = sol.p;
    doc["mu"] = sol.mu;
    doc["support"] = sol.support;
    doc["residual"] = sol.kkt_residual;
    json.write(doc, out);
    err << "spmin: support " << sol.support.size() << "/" << p.costs.size() << ", mu " << sol.mu
        << ", residual " << sol.kkt_residual << '\n';
    return kSuccess;
  }
};

struct PolicyCommand {
  GraphArgs graph;
  SolverArgs solver;
  std::string divergence = "tsallis";
  double r = 2.0;
  double theta = 1.0;
  std::string target;
  std::string source;
  std::string dot;
  JsonSink json;

  void attach(CLI::App* app) {
    graph.attach(app);
    solver.attach(app);
    app->add_option("--divergence", divergence, "Regularizer")->check(CLI::IsMember({"kl", "tsallis"}));
    app->add_option("--r", r, "Tsallis order, r > 1");
    app->add_option("--theta", theta, "Inverse temperature, theta > 0")->check(CLI::PositiveNumber);
    app->add_option("--target", target, "Absorbing target node")->required();
    app->add_option("--source", source, "Source node for flows (default: first node other than the target)");
    app->add_option("--dot", dot, "Write net flows as Graphviz DOT");
    json.attach(app, "--json", "Write JSON to this file (stdout when omitted)");
  }

  int run(std::ostream& out, std::ostream& err) const {
    if (divergence == "tsallis" && !(r > 1.0)) throw ValidationError("--r: must be greater than 1");
    const Graph g = graph.load();
    const ReferenceMatrix ref(g, parse_reference_kind(graph.ref));
    const NodeId t = node_flag(g, "--target", target);
    const Policy policy = solve_policy(g, ref, t, divergence, r, theta, solver.options());

    ordered_json doc;
    doc["schema"] = schema("policy");
    doc["divergence"] = divergence;
    if (divergence == "tsallis") doc["r"] = r;
    doc["theta"] = theta;
    doc["reference"] = graph.ref;
    doc["target"] = g.name(t);
    doc["iterations"] = policy.iterations;
    doc["converged"] = policy.converged;
    doc["duality_gap"] = policy.duality_gap;
    doc["lambda"] = names_to_values(g, policy.potential);
    ordered_json triplets = ordered_json::array();
    for (NodeId i = 0; i < g.size(); ++i) {
      const auto row = policy.transitions.row(i);
      const auto arcs = g.successors(i);
      for (std::size_t k = 0; k < row.size(); ++k)
        if (row[k] > 0.0) triplets.push_back({g.name(i), g.name(arcs[k].dst), row[k]});
    }
    doc["P"] = std::move(triplets);

    if (!source.empty() || !dot.empty()) {
      NodeId s = 0;
      if (!source.empty()) {
        s = node_flag(g, "--source", source);
        if (s == t) throw ValidationError("--source: must differ from --target");
      } else {
        s = t == 0 ? 1 : 0;
      }
      const FlowField flow = expected_visits(policy, g, s, solver.options().solver);
      ordered_json f;
      f["source"] = g.name(s);
      f["expected_cost"] = expected_cost(flow, g);
      f["conservation_residual"] = conservation_residual(flow, policy);
      f["visits"] = names_to_values(g, flow.node_visits);
      ordered_json nets = ordered_json::array();
      for (const auto& e : flow.net_flows)
        nets.push_back({{"from", g.name(e.from)}, {"to", g.name(e.to)}, {"value", e.value}});
      f["net_flows"] = std::move(nets);
      doc["flow"] = std::move(f);
      if (!dot.empty()) {
        std::ofstream file(dot);
        if (!file) throw ValidationError("--dot: cannot open " + dot);
        write_dot(file, g, flow);
      }
      err << "policy: source " << g.name(s) << ", expected cost " << doc["flow"]["expected_cost"]
          << ", " << flow.net_flows.size() << " net-flow edges\n";
    }
    json.write(doc, out);
    err << "policy: " << policy.iterations << " iterations, lambda_max "
        << *std::max_element(policy.potential.begin(), policy.potential.end())
        << ", duality gap " << policy.duality_gap << '\n';
    return kSuccess;
  }
};

struct DissimCommand {
  GraphArgs graph;
  SolverArgs solver;
  std::string kind = "tsallis-fe";
  double r = 2.0;
  double theta = 1.0;
  std::string out_path;
  JsonSink report;

  void attach(CLI::App* app) {
    graph.attach(app);
    solver.attach(app);
    app->add_option("--kind", kind, "tsallis-fe|tsallis-rsp|kl-fe|kl-rsp")
        ->check(CLI::IsMember({"tsallis-fe", "tsallis-rsp", "kl-fe", "kl-rsp"}));
    app->add_option("--r", r, "Tsallis order, r > 1");
    app->add_option("--theta", theta, "Inverse temperature, theta > 0")->check(CLI::PositiveNumber);
    app->add_option("--out", out_path, "CSV output (stdout when omitted)");
    report.attach(app, "--report", "Write a JSON summary to this file");
  }

  int run(std::ostream& out, std::ostream& err, std::size_t jobs) const {
    if (!(r > 1.0)) throw ValidationError("--r: must be greater than 1");
    const Graph g = graph.load();
    const ReferenceMatrix ref(g, parse_reference_kind(graph.ref));
    DissimilarityParams params;
    params.kind = parse_dissimilarity_kind(kind);
    params.r = r;
    params.theta = theta;
    params.policy = solver.options();
    params.jobs = jobs;
    const auto D = dissimilarity_matrix(g, ref, params);
    if (out_path.empty()) {
      write_matrix_csv(out, D.values, D.names);
    } else {
      std::ofstream file(out_path);
      if (!file) throw ValidationError("--out: cannot open " + out_path);
      write_matrix_csv(file, D.values, D.names);
    }
    const auto tri = triangle_check(D.values);
    if (!report.path.empty()) {
      ordered_json doc;
      doc["schema"] = schema("dissim");
      doc["kind"] = kind;
      doc["r"] = r;
      doc["theta"] = theta;
      doc["nodes"] = g.size();
      doc["max_duality_gap"] = D.max_duality_gap;
      doc["triangle_violations"] = tri.violations;
      report.write(doc, out);
    }
    err << "dissim: " << g.size() << " nodes, max duality gap " << D.max_duality_gap
        << ", triangle violations " << tri.violations << '\n';
    return kSuccess;
  }
};

struct ClusterCommand {
  GraphArgs graph;
  SolverArgs solver;
  std::string labels;
  std::string kind = "tsallis-fe";
  double r = 2.0;
  std::string grid = "1e-4..1e5";
  std::size_t k = 2;
  std::size_t restarts = 30;
  std::size_t repetitions = 1;
  JsonSink report;

  void attach(CLI::App* app) {
    graph.attach(app);
    solver.attach(app);
    app->add_option("--labels", labels, "Ground-truth `node label` file for NMI/ARI");
    app->add_option("--kind", kind, "tsallis-fe|tsallis-rsp|kl-fe|kl-rsp")
        ->check(CLI::IsMember({"tsallis-fe", "tsallis-rsp", "kl-fe", "kl-rsp"}));
    app->add_option("--r", r, "Tsallis order, r > 1");
    app->add_option("--grid", grid, "theta grid: lo..hi (one per decade) or comma list");
    app->add_option("--k", k, "Number of clusters")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    app->add_option("--restarts", restarts, "k-means restarts")->check(CLI::PositiveNumber);
    app->add_option("--repetitions", repetitions, "Outer repetitions averaged per grid point")
        ->check(CLI::PositiveNumber);
    report.attach(app, "--report", "Write the JSON report to this file (stdout when omitted)");
  }

  int run(std::ostream& out, std::ostream& err, std::size_t jobs, std::uint64_t seed) const {
    if (!(r > 1.0)) throw ValidationError("--r: must be greater than 1");
    const Graph g = graph.load();
    const ReferenceMatrix ref(g, parse_reference_kind(graph.ref));
    TuneOptions options;
    options.kind = parse_dissimilarity_kind(kind);
    options.r = r;
    try {
      options.grid = parse_grid(grid);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("--grid: ") + e.what());
    }
    options.k = k;
    options.restarts = restarts;
    options.repetitions = repetitions;
    options.seed = seed;
    options.jobs = jobs;
    options.policy = solver.options();
    std::optional<Partition> truth;
    if (!labels.empty()) {
      std::ifstream in(labels);
      if (!in) throw ValidationError("--labels: cannot open " + labels);
      truth = load_labels(in, g);
    }
    const auto result = tune_parameter(g, ref, options, truth);
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';

    ordered_json doc;
    doc["schema"] = schema("cluster");
    doc["kind"] = kind;
    doc["r"] = r;
    doc["k"] = k;
    doc["seed"] = seed;
    doc["restarts"] = restarts;
    doc["repetitions"] = repetitions;
    doc["best_theta"] = result.best_theta;
    ordered_json best;
    best["modularity"] = result.scores.modularity;
    if (result.has_labels) {
      best["nmi"] = result.scores.nmi;
      best["ari"] = result.scores.ari;
    }
    doc["scores"] = std::move(best);
    ordered_json assignment = ordered_json::object();
    for (NodeId i = 0; i < g.size(); ++i) assignment[g.name(i)] = result.partition.assignment[i];
    doc["assignment"] = std::move(assignment);
    ordered_json points = ordered_json::array();
    for (const auto& p : result.grid) {
      ordered_json row;
      row["theta"] = p.theta;
      row["ok"] = p.ok;
      if (p.ok) {
        row["modularity"] = p.scores.modularity;
        if (result.has_labels) {
          row["nmi"] = p.scores.nmi;
          row["ari"] = p.scores.ari;
        }
        row["clipped_eigenvalue_mass"] = p.clipped_eigenvalue_mass;
      } else {
        row["error"] = p.error;
      }
      points.push_back(std::move(row));
    }
    doc["grid"] = std::move(points);
    report.write(doc, out);
    err << "cluster: best theta " << result.best_theta << ", modularity " << result.scores.modularity;
    if (result.has_labels) err << ", NMI " << result.scores.nmi << ", ARI " << result.scores.ari;
    err << '\n';
    return kSuccess;
  }
};

struct CheckCommand {
  // triangle
  std::string matrix;
  double slack = 1e-9;
  // duality
  PolicyCommand duality;
  std::string duality_target;
  double gap_tolerance = 1e-8;
  // convexity
  std::size_t m = 20;
  std::size_t samples = 10000;
  double r_low = 1.1;
  double r_high = 4.1;
  double eig_tolerance = 1e-12;
  // kkt
  SpminCommand kkt;
  double kkt_tolerance = 1e-9;

  JsonSink json;
  CLI::App* triangle_app = nullptr;
  CLI::App* duality_app = nullptr;
  CLI::App* convexity_app = nullptr;
  CLI::App* kkt_app = nullptr;

  void attach(CLI::App* app) {
    app->require_subcommand(1);

    triangle_app = app->add_subcommand("triangle", "Audit the triangle inequality of a CSV matrix");
    triangle_app->add_option("matrix", matrix, "Matrix CSV with a header row")->required();
    triangle_app->add_option("--slack", slack, "Allowed violation")->check(CLI::NonNegativeNumber);
    json.attach(triangle_app, "--json", "Write JSON to this file (stdout when omitted)");

    duality_app = app->add_subcommand("duality", "Duality gap of converged policies");
    duality.graph.attach(duality_app);
    duality.solver.attach(duality_app);
    duality_app->add_option("--divergence", duality.divergence, "Regularizer")
        ->check(CLI::IsMember({"kl", "tsallis"}));
    duality_app->add_option("--r", duality.r, "Tsallis order, r > 1");
    duality_app->add_option("--theta", duality.theta, "Inverse temperature")->check(CLI::PositiveNumber);
    duality_app->add_option("--target", duality_target, "Single target (default: every node)");
    duality_app->add_option("--gap-tol", gap_tolerance, "Largest acceptable gap")
        ->check(CLI::NonNegativeNumber);
    json.attach(duality_app, "--json", "Write JSON to this file (stdout when omitted)");

    convexity_app = app->add_subcommand("convexity", "Random eigenvalue probe of the flow-space form");
    convexity_app->add_option("--m", m, "Dimension")->check(CLI::Range(std::size_t{2}, std::size_t{4096}));
    convexity_app->add_option("--samples", samples, "Random instances")->check(CLI::PositiveNumber);
    convexity_app->add_option("--r-low", r_low, "Lower end of the r range")->check(CLI::Range(1.0, 1e6));
    convexity_app->add_option("--r-high", r_high, "Upper end of the r range")->check(CLI::Range(1.0, 1e6));
    convexity_app->add_option("--eig-tol", eig_tolerance, "Allowed negative relative eigenvalue")
        ->check(CLI::NonNegativeNumber);
    json.attach(convexity_app, "--json", "Write JSON to this file (stdout when omitted)");

    kkt_app = kkt_app_setup(app);
  }

  CLI::App* kkt_app_setup(CLI::App* app) {
    auto* sub = app->add_subcommand("kkt", "KKT residual of an spmin solution");
    sub->add_option("--costs", kkt.costs, "Comma-separated costs")->required();
    sub->add_option("--ref", kkt.ref, "'uniform' or comma-separated reference probabilities");
    sub->add_option("--r", kkt.r, "Tsallis order, r > 1");
    sub->add_option("--T", kkt.T, "Temperature, T > 0");
    sub->add_option("--kkt-tol", kkt_tolerance, "Largest acceptable residual")->check(CLI::NonNegativeNumber);
    json.attach(sub, "--json", "Write JSON to this file (stdout when omitted)");
    return sub;
  }

  int run(std::ostream& out, std::ostream& err, std::size_t jobs, std::uint64_t seed) const {
    ordered_json doc;
    bool pass = true;
    if (triangle_app->parsed()) {
      std::ifstream in(matrix);
      if (!in) throw ValidationError("matrix: cannot open " + matrix);
      std::vector<std::string> names;
      const auto D = read_matrix_csv(in, &names);
      const auto rep = triangle_check(D, slack);
      pass = rep.violations == 0;
      doc["schema"] = schema("check.triangle");
      doc["slack"] = slack;
      doc["violations"] = rep.violations;
      doc["worst_slack"] = rep.worst_slack;
      if (D.rows() >= 3)
        doc["worst_triple"] = {names[rep.worst_i], names[rep.worst_j], names[rep.worst_k]};
      err << "triangle: " << rep.violations << " violations, worst slack " << rep.worst_slack << '\n';
    } else if (duality_app->parsed()) {
      if (duality.divergence == "tsallis" && !(duality.r > 1.0))
        throw ValidationError("--r: must be greater than 1");
      const Graph g = duality.graph.load();
      const ReferenceMatrix ref(g, parse_reference_kind(duality.graph.ref));
      std::vector<NodeId> targets;
      if (duality_target.empty()) {
        for (NodeId t = 0; t < g.size(); ++t) targets.push_back(t);
      } else {
        targets.push_back(node_flag(g, "--target", duality_target));
      }
      std::vector<double> gaps(targets.size());
      const auto options = duality.solver.options();
      parallel_for(targets.size(), jobs, [&](std::size_t i) {
        gaps[i] = solve_policy(g, ref, targets[i], duality.divergence, duality.r, duality.theta, options)
                      .duality_gap;
      });
      const double worst = *std::max_element(gaps.begin(), gaps.end());
      pass = worst <= gap_tolerance;
      doc["schema"] = schema("check.duality");
      doc["divergence"] = duality.divergence;
      doc["theta"] = duality.theta;
      doc["tolerance"] = gap_tolerance;
      doc["max_gap"] = worst;
      ordered_json per = ordered_json::object();
      for (std::size_t i = 0; i < targets.size(); ++i) per[g.name(targets[i])] = gaps[i];
      doc["gaps"] = std::move(per);
      err << "duality: max gap " << worst << " over " << targets.size() << " targets\n";
    } else if (convexity_app->parsed()) {
      if (!(r_high > r_low)) throw ValidationError("--r-high: must exceed --r-low");
      const auto rep = convexity_probe(m, samples, r_low, r_high, seed);
      pass = rep.min_relative_eigenvalue >= -eig_tolerance;
      doc["schema"] = schema("check.convexity");
      doc["m"] = m;
      doc["samples"] = rep.samples;
      doc["r_range"] = {r_low, r_high};
      doc["seed"] = seed;
      doc["min_relative_eigenvalue"] = rep.min_relative_eigenvalue;
      doc["worst_instance"] = {{"r", rep.worst_instance.r},
                               {"p", rep.worst_instance.p},
                               {"ref", rep.worst_instance.ref}};
      err << "convexity: min relative eigenvalue " << rep.min_relative_eigenvalue << " over "
          << rep.samples << " samples\n";
    } else {
      const auto p = kkt.problem();
      const auto quick = spmin(p);
      const auto bisect = spmin_bisection(p);
      double diff = 0.0;
      for (std::size_t i = 0; i < quick.p.size(); ++i)
        diff = std::max(diff, std::abs(quick.p[i] - bisect.p[i]));
      const double residual = std::max(quick.kkt_residual, bisect.kkt_residual);
      pass = residual <= kkt_tolerance;
      doc["schema"] = schema("check.kkt");
      doc["residual"] = quick.kkt_residual;
      doc["bisection_residual"] = bisect.kkt_residual;
      doc["max_solver_difference"] = diff;
      err << "kkt: residual " << residual << ", solver difference " << diff << '\n';
    }
    doc["pass"] = pass;
    json.write(doc, out);
    if (!pass) err << "check failed\n";
    return pass ? kSuccess : kCheckFailed;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse randomized shortest paths: policies, dissimilarities and clustering", "srsp"};
  app.set_version_flag("--version", SRSP_VERSION);
  app.set_config("--config", "", "key=value file mirroring the flags; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  std::size_t jobs = 0;
  std::uint64_t seed = 0;
  app.add_option("--jobs", jobs, "Worker threads across targets and grid points (0 = all cores)");
  app.add_option("--seed", seed, "Seed for every random stream");

  SpminCommand spmin_cmd;
  PolicyCommand policy_cmd;
  DissimCommand dissim_cmd;
  ClusterCommand cluster_cmd;
  CheckCommand check_cmd;
  auto* spmin_app = app.add_subcommand("spmin", "Sparse minimizer over the probability simplex");
  auto* policy_app = app.add_subcommand("policy", "Regularized routing policy toward a target");
  auto* dissim_app = app.add_subcommand("dissim", "All-pairs dissimilarity matrix");
  auto* cluster_app = app.add_subcommand("cluster", "Tune theta by modularity with kernel k-means");
  auto* check_app = app.add_subcommand("check", "Diagnostics: triangle, duality, convexity, kkt");
  spmin_cmd.attach(spmin_app);
  policy_cmd.attach(policy_app);
  dissim_cmd.attach(dissim_app);
  cluster_cmd.attach(cluster_app);
  check_cmd.attach(check_app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kValidationError;
  }

  try {
    if (spmin_app->parsed()) return spmin_cmd.run(out, err);
    if (policy_app->parsed()) return policy_cmd.run(out, err);
    if (dissim_app->parsed()) return dissim_cmd.run(out, err, jobs);
    if (cluster_app->parsed()) return cluster_cmd.run(out, err, jobs, seed);
    return check_cmd.run(out, err, jobs, seed);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (residual " << e.residual() << ")\n";
    return kNotConverged;
  } catch (const SingularSystemError& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  }
}

}  // namespace srsp::cli
