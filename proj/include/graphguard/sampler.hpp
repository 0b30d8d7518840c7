#pragma once

#include <iosfwd>
#include <vector>

#include "graphguard/rng.hpp"
#include "graphguard/txgraph.hpp"

namespace graphguard {

struct SamplerConfig {
  int subgraph_size = 2;  // total nodes, initial node included
  double restart_prob = 0.5;
  bool weighted = false;          // time-weighted transitions (WS)
  bool multi_relational = false;  // keep per-relation adjacency (MR)
  int rounds = 256;               // scoring rounds per node
  double epsilon = 1e-6;          // transition weight floor, relative to t_range
  int walk_budget_factor = 100;   // walk steps allowed = factor * subgraph_size

  void validate() const;
};

enum class Polarity { kNegative = 0, kPositive = 1 };

struct InstancePair {
  NodeId target = 0;
  NodeId start = 0;  // walk origin: the target for positive pairs
  MultiRelSubgraph subgraph;  // row 0 (the start node) is zeroed
  std::vector<double> target_features;
  int label = 1;  // 1 positive, 0 negative
};

// Random order of the target-day nodes; history nodes never appear.
std::vector<NodeId> epoch_targets(const TransactionGraph& graph, Rng& rng);

// Random walk with restart over past-pointing edges. Returns distinct visited
// nodes in visit order, start first; may be shorter than subgraph_size when
// too few nodes are reachable within the step budget.
std::vector<NodeId> rwr_sample(const TransactionGraph& graph, NodeId start, const SamplerConfig& config,
                               Rng& rng);

// Absolute transition weight floor for a graph: epsilon * t_range (epsilon
// alone when t_range is 0).
double transition_floor(const TransactionGraph& graph, const SamplerConfig& config);

InstancePair make_pair(const TransactionGraph& graph, NodeId target, Polarity polarity,
                       const SamplerConfig& config, Rng& rng);

// Text dump of a pair for inspection.
void write_pair(std::ostream& out, const TransactionGraph& graph, const InstancePair& pair);

}  // namespace graphguard
