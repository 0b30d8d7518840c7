#include "graphguard/sampler.hpp"

#include <algorithm>
#include <ostream>

#include "graphguard/error.hpp"

namespace graphguard {

void SamplerConfig::validate() const {
  if (subgraph_size < 1) throw Error("sampler: subgraph_size must be >= 1");
  if (!(restart_prob > 0 && restart_prob < 1)) throw Error("sampler: restart_prob must be in (0, 1)");
  if (rounds < 1) throw Error("sampler: rounds must be >= 1");
  if (!(epsilon > 0)) throw Error("sampler: epsilon must be > 0");
  if (walk_budget_factor < 1) throw Error("sampler: walk_budget_factor must be >= 1");
}

std::vector<NodeId> epoch_targets(const TransactionGraph& graph, Rng& rng) {
  std::vector<NodeId> targets = graph.target_nodes();
  if (targets.empty()) throw Error("epoch_targets: graph has no target-day nodes");
  for (std::size_t i = targets.size(); i > 1; --i) std::swap(targets[i - 1], targets[rng.uniform_index(i)]);
  return targets;
}

double transition_floor(const TransactionGraph& graph, const SamplerConfig& config) {
  return graph.t_range() > 0 ? config.epsilon * graph.t_range() : config.epsilon;
}

namespace {

// Picks one out-edge of v (all relations, parallel edges counted separately)
// and returns its destination.
NodeId step(const TransactionGraph& graph, NodeId v, std::size_t degree, const SamplerConfig& config,
            double floor, Rng& rng) {
  bool uniform = !config.weighted;
  double total = 0;
  if (!uniform) {
    // Equal weights reduce to the uniform rule; taking that path keeps the
    // random stream identical to unweighted sampling.
    bool seen = false;
    bool all_equal = true;
    double first = 0;
    for (std::size_t r = 0; r < graph.num_relations(); ++r)
      for (double w : graph.out_weights(v, r)) {
        total += w + floor;
        if (!seen) {
          first = w;
          seen = true;
        } else if (w != first) {
          all_equal = false;
        }
      }
    uniform = all_equal;
  }

  if (uniform) {
    std::size_t index = rng.uniform_index(degree);
    for (std::size_t r = 0; r < graph.num_relations(); ++r) {
      const auto dst = graph.out_neighbors(v, r);
      if (index < dst.size()) return dst[index];
      index -= dst.size();
    }
  } else {
    double u = rng.uniform01() * total;
    NodeId last = -1;
    for (std::size_t r = 0; r < graph.num_relations(); ++r) {
      const auto dst = graph.out_neighbors(v, r);
      const auto w = graph.out_weights(v, r);
      for (std::size_t e = 0; e < dst.size(); ++e) {
        u -= w[e] + floor;
        last = dst[e];
        if (u < 0) return dst[e];
      }
    }
    return last;  // rounding at the upper end
  }
  throw Error("rwr step: degree bookkeeping failed");
}

}  // namespace

std::vector<NodeId> rwr_sample(const TransactionGraph& graph, NodeId start, const SamplerConfig& config,
                               Rng& rng) {
  if (start < 0 || static_cast<std::size_t>(start) >= graph.num_nodes())
    throw Error("rwr_sample: start node out of range");
  std::vector<NodeId> visited{start};
  const std::size_t want = static_cast<std::size_t>(config.subgraph_size);
  if (want <= 1 || graph.out_degree(start) == 0) return visited;

  const double floor = transition_floor(graph, config);
  const long budget = static_cast<long>(config.walk_budget_factor) * config.subgraph_size;
  NodeId current = start;
  for (long steps = 0; steps < budget && visited.size() < want; ++steps) {
    if (current != start && rng.uniform01() < config.restart_prob) {
      current = start;
      continue;
    }
    const std::size_t degree = graph.out_degree(current);
    if (degree == 0) {
      current = start;
      continue;
    }
    current = step(graph, current, degree, config, floor, rng);
    if (std::find(visited.begin(), visited.end(), current) == visited.end()) visited.push_back(current);
  }
  return visited;
}

InstancePair make_pair(const TransactionGraph& graph, NodeId target, Polarity polarity,
                       const SamplerConfig& config, Rng& rng) {
  if (target < 0 || static_cast<std::size_t>(target) >= graph.num_nodes())
    throw Error("make_pair: target out of range");
  InstancePair pair;
  pair.target = target;
  pair.label = polarity == Polarity::kPositive ? 1 : 0;
  if (polarity == Polarity::kPositive) {
    pair.start = target;
  } else {
    if (graph.num_nodes() < 2) throw Error("make_pair: negative pair needs at least 2 nodes");
    // Uniform over all nodes except the target.
    auto pick = static_cast<NodeId>(rng.uniform_index(graph.num_nodes() - 1));
    pair.start = pick >= target ? pick + 1 : pick;
  }
  const std::vector<NodeId> nodes = rwr_sample(graph, pair.start, config, rng);
  pair.subgraph = config.multi_relational ? to_multi_relational(nodes, graph) : to_uni_relational(nodes, graph);
  std::fill(pair.subgraph.features.row(0).begin(), pair.subgraph.features.row(0).end(), 0.0);
  const auto tf = graph.features(target);
  pair.target_features.assign(tf.begin(), tf.end());
  return pair;
}

void write_pair(std::ostream& out, const TransactionGraph& graph, const InstancePair& pair) {
  out << "pair target=" << graph.tx_id(pair.target) << " start=" << graph.tx_id(pair.start)
      << " label=" << pair.label << " nodes=";
  for (std::size_t i = 0; i < pair.subgraph.nodes.size(); ++i)
    out << (i ? ";" : "") << graph.tx_id(pair.subgraph.nodes[i]);
  for (std::size_t r = 0; r < pair.subgraph.relations.size(); ++r) {
    out << " rel" << r << '=';
    const auto& adj = pair.subgraph.relations[r];
    bool first = true;
    for (std::size_t i = 0; i < adj.size(); ++i)
      for (auto j : adj.neighbors[i])
        if (static_cast<std::size_t>(j) > i) {
          out << (first ? "" : ";") << i << '-' << j;
          first = false;
        }
  }
  out << '\n';
}

}  // namespace graphguard
