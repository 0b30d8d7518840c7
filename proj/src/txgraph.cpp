#include "graphguard/txgraph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "csv.hpp"
#include "graphguard/error.hpp"

namespace graphguard {

void GraphConfig::validate() const {
  if (relations.empty()) throw Error("graph config: relations must be nonempty");
  if (theta < 1) throw Error("graph config: theta must be >= 1");
}

std::size_t Adjacency::edge_count() const {
  std::size_t twice = 0;
  for (const auto& n : neighbors) twice += n.size();
  return twice / 2;
}

bool Adjacency::connected(std::size_t i, std::size_t j) const {
  const auto& n = neighbors[i];
  return std::binary_search(n.begin(), n.end(), static_cast<std::int32_t>(j));
}

TransactionGraph TransactionGraph::build(std::span<const Transaction> batch,
                                         std::span<const Transaction> history,
                                         const GraphConfig& config) {
  config.validate();
  if (batch.empty()) throw Error("build_graph: empty batch");

  struct Entry {
    const Transaction* tx;
    bool target;
  };
  std::vector<Entry> entries;
  entries.reserve(batch.size() + history.size());
  for (const auto& tx : batch) entries.push_back({&tx, true});
  for (const auto& tx : history) entries.push_back({&tx, false});
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return earlier(*a.tx, *b.tx); });
  {
    std::unordered_set<std::int64_t> ids;
    for (const auto& e : entries)
      if (!ids.insert(e.tx->tx_id).second)
        throw Error("build_graph: duplicate tx_id " + std::to_string(e.tx->tx_id));
  }

  TransactionGraph g;
  g.relation_names_ = config.relations;
  g.feature_names_ = config.features;
  if (g.feature_names_.empty())
    for (const auto& [name, value] : batch.front().numeric) g.feature_names_.push_back(name);
  if (g.feature_names_.empty()) throw Error("build_graph: no numeric features available");

  const std::size_t n = entries.size();
  g.tx_ids_.resize(n);
  g.times_.resize(n);
  g.labels_.resize(n);
  g.days_.resize(n);
  g.is_target_.resize(n);
  g.features_ = DenseMatrix(n, g.feature_names_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Transaction& tx = *entries[i].tx;
    g.tx_ids_[i] = tx.tx_id;
    g.times_[i] = tx.time;
    g.labels_[i] = tx.label;
    g.days_[i] = tx.day;
    g.is_target_[i] = entries[i].target ? 1 : 0;
    for (std::size_t f = 0; f < g.feature_names_.size(); ++f) g.features_(i, f) = tx.value(g.feature_names_[f]);
  }
  g.t_range_ = static_cast<double>(g.times_.back() - g.times_.front());

  for (const auto& field : config.relations) {
    Relation rel;
    rel.keys.resize(n);
    std::unordered_map<std::string, std::int32_t> intern;
    std::vector<std::vector<NodeId>> groups;
    std::vector<std::size_t> rank(n);  // position of node within its key group
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, inserted] = intern.try_emplace(entries[i].tx->category(field),
                                               static_cast<std::int32_t>(groups.size()));
      if (inserted) groups.emplace_back();
      rel.keys[i] = it->second;
      rank[i] = groups[it->second].size();
      groups[it->second].push_back(static_cast<NodeId>(i));
    }
    // Node i links to every earlier member of its group.
    rel.offsets.resize(n + 1);
    rel.offsets[0] = 0;
    for (std::size_t i = 0; i < n; ++i) rel.offsets[i + 1] = rel.offsets[i] + rank[i];
    rel.dst.resize(rel.offsets[n]);
    rel.weight.resize(rel.offsets[n]);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& group = groups[rel.keys[i]];
      std::size_t out = rel.offsets[i];
      for (std::size_t p = 0; p < rank[i]; ++p, ++out) {
        const NodeId j = group[p];
        rel.dst[out] = j;
        rel.weight[out] = g.t_range_ - static_cast<double>(g.times_[i] - g.times_[j]);
      }
    }
    g.relations_.push_back(std::move(rel));
  }
  return g;
}

std::size_t TransactionGraph::num_edges() const {
  std::size_t total = 0;
  for (const auto& rel : relations_) total += rel.dst.size();
  return total;
}

std::span<const NodeId> TransactionGraph::out_neighbors(NodeId v, std::size_t r) const {
  const Relation& rel = relations_[r];
  return std::span<const NodeId>(rel.dst).subspan(rel.offsets[v], rel.offsets[v + 1] - rel.offsets[v]);
}

std::span<const double> TransactionGraph::out_weights(NodeId v, std::size_t r) const {
  const Relation& rel = relations_[r];
  return std::span<const double>(rel.weight).subspan(rel.offsets[v], rel.offsets[v + 1] - rel.offsets[v]);
}

std::size_t TransactionGraph::out_degree(NodeId v) const {
  std::size_t deg = 0;
  for (const auto& rel : relations_) deg += rel.offsets[v + 1] - rel.offsets[v];
  return deg;
}

std::vector<NodeId> TransactionGraph::target_nodes() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < num_nodes(); ++i)
    if (is_target_[i]) out.push_back(static_cast<NodeId>(i));
  return out;
}

void TransactionGraph::write_edges(std::ostream& out) const {
  out << "src,dst,relation,weight\n";
  for (std::size_t v = 0; v < num_nodes(); ++v)
    for (std::size_t r = 0; r < num_relations(); ++r) {
      const auto dst = out_neighbors(static_cast<NodeId>(v), r);
      const auto w = out_weights(static_cast<NodeId>(v), r);
      for (std::size_t e = 0; e < dst.size(); ++e)
        out << tx_ids_[v] << ',' << tx_ids_[dst[e]] << ',' << relation_names_[r] << ','
            << csv::format_double(w[e]) << '\n';
    }
}

void TransactionGraph::write_edges(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_edges(out);
}

namespace {

void check_nodes(std::span<const NodeId> nodes, const TransactionGraph& graph) {
  if (nodes.empty()) throw Error("subgraph: empty node set");
  for (NodeId v : nodes)
    if (v < 0 || static_cast<std::size_t>(v) >= graph.num_nodes()) throw Error("subgraph: node out of range");
}

DenseMatrix gather_features(std::span<const NodeId> nodes, const TransactionGraph& graph) {
  DenseMatrix x(nodes.size(), graph.num_features());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto row = graph.features(nodes[i]);
    std::copy(row.begin(), row.end(), x.row(i).begin());
  }
  return x;
}

template <typename Linked>
Adjacency local_adjacency(std::size_t n, Linked linked) {
  Adjacency adj;
  adj.neighbors.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && linked(i, j)) adj.neighbors[i].push_back(static_cast<std::int32_t>(j));
  return adj;
}

}  // namespace

MultiRelSubgraph to_multi_relational(std::span<const NodeId> nodes, const TransactionGraph& graph) {
  check_nodes(nodes, graph);
  MultiRelSubgraph sub;
  sub.nodes.assign(nodes.begin(), nodes.end());
  for (std::size_t r = 0; r < graph.num_relations(); ++r)
    sub.relations.push_back(local_adjacency(nodes.size(), [&](std::size_t i, std::size_t j) {
      return graph.key(r, nodes[i]) == graph.key(r, nodes[j]);
    }));
  sub.features = gather_features(nodes, graph);
  return sub;
}

Adjacency collapse_uni_relational(std::span<const NodeId> nodes, const TransactionGraph& graph) {
  check_nodes(nodes, graph);
  return local_adjacency(nodes.size(), [&](std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < graph.num_relations(); ++r)
      if (graph.key(r, nodes[i]) == graph.key(r, nodes[j])) return true;
    return false;
  });
}

MultiRelSubgraph to_uni_relational(std::span<const NodeId> nodes, const TransactionGraph& graph) {
  MultiRelSubgraph sub;
  sub.relations.push_back(collapse_uni_relational(nodes, graph));
  sub.nodes.assign(nodes.begin(), nodes.end());
  sub.features = gather_features(nodes, graph);
  return sub;
}

}  // namespace graphguard
