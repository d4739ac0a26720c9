#include "calr/graphcluster/infomap.hpp"

#include "calr/core/error.hpp"
#include "calr/core/numeric.hpp"

#include <algorithm>
#include <numeric>

namespace calr::graph {
namespace {

// Partition of the leaf graph viewed as a graph of super-nodes.
struct LevelGraph {
  std::vector<double> flow;       // sum of member visit rates
  std::vector<double> exit_alone; // exit flow of the super-node as its own module
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;  // normalized link flow
};

struct LeafGraph {
  std::size_t n = 0;
  std::vector<double> flow;
  std::vector<Edge> edges;  // positive weights, already divided by total degree
  double node_entropy = 0.0;  // sum plogp(flow), constant for the graph
};

LeafGraph make_leaf_graph(const Graph& g) {
  LeafGraph leaf;
  leaf.n = g.n_nodes;
  const auto degree = g.degrees();
  const double total = std::accumulate(degree.begin(), degree.end(), 0.0);
  leaf.flow.assign(leaf.n, 0.0);
  if (total <= 0.0) return leaf;
  for (std::size_t v = 0; v < leaf.n; ++v) {
    leaf.flow[v] = degree[v] / total;
    leaf.node_entropy += plogp(leaf.flow[v]);
  }
  for (const auto& e : g.edges) {
    if (e.weight > 0.0) leaf.edges.push_back(Edge{e.i, e.j, e.weight / total});
  }
  return leaf;
}

LevelGraph aggregate(const LeafGraph& leaf, const std::vector<int>& group, std::size_t n_groups) {
  LevelGraph lv;
  lv.flow.assign(n_groups, 0.0);
  lv.exit_alone.assign(n_groups, 0.0);
  lv.adj.assign(n_groups, {});
  for (std::size_t v = 0; v < leaf.n; ++v) lv.flow[static_cast<std::size_t>(group[v])] += leaf.flow[v];
  std::vector<std::vector<std::pair<std::size_t, double>>> raw(n_groups);
  for (const auto& e : leaf.edges) {
    const auto a = static_cast<std::size_t>(group[e.i]);
    const auto b = static_cast<std::size_t>(group[e.j]);
    if (a == b) continue;
    lv.exit_alone[a] += e.weight;
    lv.exit_alone[b] += e.weight;
    raw[a].emplace_back(b, e.weight);
    raw[b].emplace_back(a, e.weight);
  }
  for (std::size_t a = 0; a < n_groups; ++a) {
    auto& r = raw[a];
    std::sort(r.begin(), r.end());
    for (const auto& [b, w] : r) {
      if (!lv.adj[a].empty() && lv.adj[a].back().first == b) {
        lv.adj[a].back().second += w;
      } else {
        lv.adj[a].emplace_back(b, w);
      }
    }
  }
  return lv;
}

// Relabels group ids to 0..K-1 by first appearance; returns K.
std::size_t compact(std::vector<int>& ids) {
  std::vector<int> remap;
  int next = 0;
  for (int& id : ids) {
    if (static_cast<std::size_t>(id) >= remap.size()) remap.resize(static_cast<std::size_t>(id) + 1, -1);
    if (remap[static_cast<std::size_t>(id)] < 0) remap[static_cast<std::size_t>(id)] = next++;
    id = remap[static_cast<std::size_t>(id)];
  }
  return static_cast<std::size_t>(next);
}

class MoveOptimizer {
public:
  MoveOptimizer(const LevelGraph& lv, std::vector<int> init, double node_entropy)
      : lv_(lv), module_(std::move(init)), node_entropy_(node_entropy) {
    const std::size_t n = lv.flow.size();
    exit_.assign(n, 0.0);
    flow_.assign(n, 0.0);
    members_.assign(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
      const auto m = static_cast<std::size_t>(module_[a]);
      exit_[m] += lv.exit_alone[a];
      flow_[m] += lv.flow[a];
      ++members_[m];
      for (const auto& [b, w] : lv.adj[a]) {
        if (module_[b] == module_[a]) exit_[m] -= w;  // each internal link seen from both ends
      }
    }
    for (std::size_t m = 0; m < n; ++m) {
      total_exit_ += exit_[m];
      if (members_[m] == 0) free_.push_back(m);
    }
    std::reverse(free_.begin(), free_.end());
  }

  [[nodiscard]] double codelength() const {
    double l = plogp(total_exit_) - node_entropy_;
    for (std::size_t m = 0; m < exit_.size(); ++m) {
      if (members_[m] == 0) continue;
      l += -2.0 * plogp(exit_[m]) + plogp(exit_[m] + flow_[m]);
    }
    return l;
  }

  // One pass per shuffled order until a full pass makes no move. Returns true if anything moved.
  bool optimize(Rng& rng, double min_improvement, double& codelength, std::vector<double>* trace,
                bool& monotone) {
    const std::size_t n = lv_.flow.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> link_to(n, 0.0);
    std::vector<std::size_t> touched;
    bool any = false;
    for (int pass = 0; pass < 200; ++pass) {
      rng.shuffle(std::span<std::size_t>(order));
      bool moved = false;
      for (std::size_t a : order) {
        const auto from = static_cast<std::size_t>(module_[a]);
        touched.clear();
        for (const auto& [b, w] : lv_.adj[a]) {
          const auto mb = static_cast<std::size_t>(module_[b]);
          if (link_to[mb] == 0.0) touched.push_back(mb);
          link_to[mb] += w;
        }
        const double link_from = link_to[from];

        const double p = lv_.flow[a];
        const double e = lv_.exit_alone[a];
        const double q_from_new = exit_[from] - e + 2.0 * link_from;
        const double f_from_new = flow_[from] - p;

        auto delta_for = [&](double q_to, double f_to, double link) {
          const double q_to_new = q_to + e - 2.0 * link;
          const double f_to_new = f_to + p;
          const double total_new = total_exit_ - exit_[from] + q_from_new - q_to + q_to_new;
          return plogp(total_new) - plogp(total_exit_) -
                 2.0 * (plogp(q_from_new) + plogp(q_to_new) - plogp(exit_[from]) - plogp(q_to)) +
                 (plogp(q_from_new + f_from_new) + plogp(q_to_new + f_to_new) -
                  plogp(exit_[from] + flow_[from]) - plogp(q_to + f_to));
        };

        double best_delta = -min_improvement;
        std::size_t best = from;
        std::sort(touched.begin(), touched.end());
        for (std::size_t m : touched) {
          if (m == from) continue;
          const double d = delta_for(exit_[m], flow_[m], link_to[m]);
          if (d < best_delta) {
            best_delta = d;
            best = m;
          }
        }
        bool to_empty = false;
        if (members_[from] > 1 && !free_.empty()) {
          const double d = delta_for(0.0, 0.0, 0.0);
          if (d < best_delta) {
            best_delta = d;
            best = free_.back();
            to_empty = true;
          }
        }
        if (best != from) {
          const double link_best = to_empty ? 0.0 : link_to[best];
          if (to_empty) free_.pop_back();
          const double q_to_new = exit_[best] + e - 2.0 * link_best;
          total_exit_ += (q_from_new - exit_[from]) + (q_to_new - exit_[best]);
          exit_[from] = q_from_new;
          flow_[from] = f_from_new;
          exit_[best] = q_to_new;
          flow_[best] += p;
          --members_[from];
          ++members_[best];
          if (members_[from] == 0) {
            exit_[from] = 0.0;
            flow_[from] = 0.0;
            free_.push_back(from);
          }
          module_[a] = static_cast<int>(best);
          const double next = codelength + best_delta;
          if (!(next < codelength)) monotone = false;
          codelength = next;
          if (trace) trace->push_back(codelength);
          moved = true;
          any = true;
        }
        for (std::size_t m : touched) link_to[m] = 0.0;
      }
      if (!moved) break;
    }
    return any;
  }

  [[nodiscard]] const std::vector<int>& modules() const { return module_; }

private:
  const LevelGraph& lv_;
  std::vector<int> module_;
  std::vector<double> exit_;
  std::vector<double> flow_;
  std::vector<std::size_t> members_;
  std::vector<std::size_t> free_;
  double total_exit_ = 0.0;
  double node_entropy_;
};

struct TrialResult {
  std::vector<int> leaf_module;
  double codelength = 0.0;
  std::vector<double> trace;
  bool monotone = true;
};

TrialResult run_trial(const LeafGraph& leaf, Rng rng, const InfomapOptions& opt) {
  TrialResult t;
  t.leaf_module.resize(leaf.n);
  std::iota(t.leaf_module.begin(), t.leaf_module.end(), 0);
  std::vector<int> identity(leaf.n);
  std::iota(identity.begin(), identity.end(), 0);
  const LevelGraph leaf_level = aggregate(leaf, identity, leaf.n);

  t.codelength = MoveOptimizer(leaf_level, identity, leaf.node_entropy).codelength();
  std::vector<double>* trace = opt.record_trace ? &t.trace : nullptr;
  if (trace) trace->push_back(t.codelength);

  for (int round = 0; round < 100; ++round) {
    bool improved = false;
    // Leaf-level moves starting from the current modules (fine tuning).
    {
      std::vector<int> init = t.leaf_module;
      compact(init);
      MoveOptimizer fine(leaf_level, init, leaf.node_entropy);
      if (fine.optimize(rng, opt.min_improvement, t.codelength, trace, t.monotone)) {
        t.leaf_module = fine.modules();
        improved = true;
      }
    }
    // Coarse moves of whole modules, aggregating until nothing moves.
    for (;;) {
      std::vector<int> groups = t.leaf_module;
      const std::size_t k = compact(groups);
      const LevelGraph lv = aggregate(leaf, groups, k);
      std::vector<int> init(k);
      std::iota(init.begin(), init.end(), 0);
      MoveOptimizer coarse(lv, init, leaf.node_entropy);
      if (!coarse.optimize(rng, opt.min_improvement, t.codelength, trace, t.monotone)) break;
      for (std::size_t v = 0; v < leaf.n; ++v) {
        t.leaf_module[v] = coarse.modules()[static_cast<std::size_t>(groups[v])];
      }
      improved = true;
    }
    if (!improved) break;
  }
  compact(t.leaf_module);
  return t;
}

}  // namespace

InfomapResult infomap_cluster(const Graph& graph, Rng& rng, const InfomapOptions& options) {
  if (graph.n_nodes == 0) throw InvalidArgument("infomap_cluster: empty graph");
  graph.validate();
  if (options.trials < 1) throw InvalidArgument("infomap_cluster: trials must be >= 1");
  const LeafGraph leaf = make_leaf_graph(graph);

  InfomapResult result;
  TrialResult best;
  bool all_monotone = true;
  for (int trial = 0; trial < options.trials; ++trial) {
    TrialResult t = run_trial(leaf, rng.split(static_cast<std::uint64_t>(trial)), options);
    all_monotone = all_monotone && t.monotone;
    if (trial == 0 || t.codelength < best.codelength - options.min_improvement) {
      best = std::move(t);
      result.trial = trial;
    }
  }

  result.partition.module_of = best.leaf_module;
  result.partition.codelength = map_equation(graph, best.leaf_module);
  result.trace = std::move(best.trace);
  result.monotone = all_monotone;

  std::vector<int> size(graph.n_nodes, 0);
  for (int m : best.leaf_module) ++size[static_cast<std::size_t>(m)];
  std::vector<int> raw(graph.n_nodes);
  for (std::size_t v = 0; v < graph.n_nodes; ++v) {
    const int m = best.leaf_module[v];
    raw[v] = size[static_cast<std::size_t>(m)] >= options.min_cluster_size ? m : kOutlier;
  }
  result.assignment = ClusterAssignment::from_raw(raw, AssignmentScope::global());
  return result;
}

}  // namespace calr::graph
