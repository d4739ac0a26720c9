#include "calr/graphcluster/map_equation.hpp"

#include "calr/core/error.hpp"

#include <cmath>
#include <string>
#include <map>

namespace calr::graph {
namespace {

double entropy_term(double part, double whole) {
  if (part <= 0.0 || whole <= 0.0) return 0.0;
  const double r = part / whole;
  return -r * std::log2(r);
}

}  // namespace

double map_equation(const Graph& graph, std::span<const int> module_of) {
  if (graph.n_nodes == 0) throw InvalidArgument("map_equation: empty graph");
  if (module_of.size() != graph.n_nodes) {
    throw InvalidArgument("map_equation: partition covers " + std::to_string(module_of.size()) +
                          " of " + std::to_string(graph.n_nodes) + " nodes");
  }
  for (int m : module_of) {
    if (m < 0) throw InvalidArgument("map_equation: negative module id");
  }

  const auto degree = graph.degrees();
  double total = 0.0;
  for (double d : degree) total += d;
  if (total <= 0.0) return 0.0;  // no flow anywhere

  std::map<int, double> exit_flow;
  std::map<int, std::vector<double>> node_flows;
  for (std::size_t v = 0; v < graph.n_nodes; ++v) {
    exit_flow.try_emplace(module_of[v], 0.0);
    node_flows[module_of[v]].push_back(degree[v] / total);
  }
  for (const auto& e : graph.edges) {
    if (e.weight <= 0.0) continue;
    if (module_of[e.i] != module_of[e.j]) {
      exit_flow[module_of[e.i]] += e.weight / total;
      exit_flow[module_of[e.j]] += e.weight / total;
    }
  }

  double q = 0.0;
  for (const auto& [m, qm] : exit_flow) q += qm;

  double index_term = 0.0;
  for (const auto& [m, qm] : exit_flow) index_term += entropy_term(qm, q);
  double codelength = q * index_term;

  for (const auto& [m, flows] : node_flows) {
    const double qm = exit_flow[m];
    double pm = qm;
    for (double p : flows) pm += p;
    double h = entropy_term(qm, pm);
    for (double p : flows) h += entropy_term(p, pm);
    codelength += pm * h;
  }
  return codelength;
}

}  // namespace calr::graph
