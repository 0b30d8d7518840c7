#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "graphguard/dense.hpp"
#include "graphguard/transactions.hpp"

namespace graphguard {

using NodeId = std::int32_t;

struct GraphConfig {
  std::vector<std::string> relations{"card_id"};  // categorical fields that link transactions
  std::vector<std::string> features;              // numeric node features
  int theta = 7;                                  // history window in days

  void validate() const;
};

// Undirected local adjacency: neighbors[i] lists the local indices adjacent to
// i in ascending order, without self-loops.
struct Adjacency {
  std::vector<std::vector<std::int32_t>> neighbors;

  std::size_t size() const { return neighbors.size(); }
  std::size_t edge_count() const;
  bool connected(std::size_t i, std::size_t j) const;
};

struct MultiRelSubgraph {
  std::vector<NodeId> nodes;         // nodes[0] is the walk's initial node
  std::vector<Adjacency> relations;  // one per relation, or one collapsed view
  DenseMatrix features;              // one row per node
};

// Weighted directed multigraph over B_i and its history window. Nodes are
// numbered in (time, tx_id) order, so every edge src -> dst has dst < src.
// Per relation, out-edges are stored CSR-style sorted by destination.
class TransactionGraph {
 public:
  static TransactionGraph build(std::span<const Transaction> batch, std::span<const Transaction> history,
                                const GraphConfig& config);

  std::size_t num_nodes() const { return tx_ids_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  std::size_t num_features() const { return features_.cols(); }
  std::size_t num_edges() const;

  const std::vector<std::string>& relation_names() const { return relation_names_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  std::int64_t tx_id(NodeId v) const { return tx_ids_[v]; }
  std::int64_t time(NodeId v) const { return times_[v]; }
  int label(NodeId v) const { return labels_[v]; }
  int day(NodeId v) const { return days_[v]; }
  bool is_target(NodeId v) const { return is_target_[v] != 0; }
  std::span<const double> features(NodeId v) const { return features_.row(v); }
  const DenseMatrix& feature_matrix() const { return features_; }

  // Interned categorical value of node v under relation r.
  std::int32_t key(std::size_t r, NodeId v) const { return relations_[r].keys[v]; }

  std::span<const NodeId> out_neighbors(NodeId v, std::size_t r) const;
  std::span<const double> out_weights(NodeId v, std::size_t r) const;
  std::size_t out_degree(NodeId v) const;

  double t_range() const { return t_range_; }

  // is_target nodes in node order.
  std::vector<NodeId> target_nodes() const;

  // Debug edge list "src,dst,relation,weight" with src/dst as tx ids.
  void write_edges(std::ostream& out) const;
  void write_edges(const std::filesystem::path& path) const;

 private:
  struct Relation {
    std::vector<std::int32_t> keys;
    std::vector<std::size_t> offsets;
    std::vector<NodeId> dst;
    std::vector<double> weight;
  };

  std::vector<std::string> relation_names_;
  std::vector<std::string> feature_names_;
  std::vector<std::int64_t> tx_ids_;
  std::vector<std::int64_t> times_;
  std::vector<int> labels_;
  std::vector<int> days_;
  std::vector<char> is_target_;
  DenseMatrix features_;
  std::vector<Relation> relations_;
  double t_range_ = 0;
};

// Per-relation undirected adjacency restricted to `nodes`: i ~ j under r iff
// both transactions share the value of r. Features are copied as-is.
MultiRelSubgraph to_multi_relational(std::span<const NodeId> nodes, const TransactionGraph& graph);

// Union over relations with parallel edges collapsed.
Adjacency collapse_uni_relational(std::span<const NodeId> nodes, const TransactionGraph& graph);

// Same as to_multi_relational but with a single collapsed adjacency.
MultiRelSubgraph to_uni_relational(std::span<const NodeId> nodes, const TransactionGraph& graph);

}  // namespace graphguard
