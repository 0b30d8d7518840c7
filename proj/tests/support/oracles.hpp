#pragma once
// Independent reference implementations used only by tests. Each one is
// written from the definitions, deliberately naive, and shares no code with
// the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "graphguard/dense.hpp"
#include "graphguard/transactions.hpp"
#include "graphguard/txgraph.hpp"

namespace oracle {

struct Edge {
  std::int64_t src, dst;
  std::string relation;
  double weight;
  auto key() const { return std::tie(src, dst, relation, weight); }
  bool operator<(const Edge& o) const { return key() < o.key(); }
  bool operator==(const Edge& o) const { return key() == o.key(); }
};

inline std::string field_of(const graphguard::Transaction& tx, const std::string& f) {
  if (f == "card_id") return tx.card_id;
  if (f == "merchant_id") return tx.merchant_id;
  return tx.categorical.at(f);
}

// All ordered pairs (newer i, older j) sharing a key, weight t_range - (t_i - t_j).
inline std::vector<Edge> brute_force_edges(const std::vector<graphguard::Transaction>& txs,
                                           const std::vector<std::string>& relations) {
  std::int64_t lo = txs.front().time, hi = txs.front().time;
  for (const auto& t : txs) {
    lo = std::min(lo, t.time);
    hi = std::max(hi, t.time);
  }
  const std::int64_t t_range = hi - lo;
  std::vector<Edge> out;
  for (const auto& a : txs)
    for (const auto& b : txs) {
      const bool a_newer = a.time > b.time || (a.time == b.time && a.tx_id > b.tx_id);
      if (!a_newer) continue;
      for (const auto& r : relations)
        if (field_of(a, r) == field_of(b, r))
          out.push_back({a.tx_id, b.tx_id, r, static_cast<double>(t_range - (a.time - b.time))});
    }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Edge> graph_edges(const graphguard::TransactionGraph& g) {
  std::vector<Edge> out;
  for (graphguard::NodeId v = 0; v < static_cast<graphguard::NodeId>(g.num_nodes()); ++v)
    for (std::size_t r = 0; r < g.num_relations(); ++r) {
      const auto nb = g.out_neighbors(v, r);
      const auto w = g.out_weights(v, r);
      for (std::size_t e = 0; e < nb.size(); ++e) out.push_back({g.tx_id(v), g.tx_id(nb[e]), g.relation_names()[r], w[e]});
    }
  std::sort(out.begin(), out.end());
  return out;
}

using Mat = std::vector<std::vector<double>>;

inline Mat to_mat(const graphguard::DenseMatrix& m) {
  Mat out(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

inline Mat dense_adjacency(const graphguard::Adjacency& a) {
  Mat out(a.size(), std::vector<double>(a.size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (auto j : a.neighbors[i]) out[i][j] = 1.0;
  return out;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  Mat out(a.size(), std::vector<double>(b.empty() ? 0 : b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < out[i].size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

inline Mat relu(Mat m) {
  for (auto& r : m)
    for (auto& v : r) v = std::max(v, 0.0);
  return m;
}

// relu(D^-1/2 (A+I) D^-1/2 X W) with explicit dense matrices.
inline Mat gcn(const Mat& adj, const Mat& x, const Mat& w) {
  const std::size_t n = adj.size();
  Mat a_hat = adj;
  for (std::size_t i = 0; i < n; ++i) a_hat[i][i] += 1.0;
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) deg[i] += a_hat[i][j];
  Mat norm(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) norm[i][j] = a_hat[i][j] / std::sqrt(deg[i]) / std::sqrt(deg[j]);
  return relu(matmul(matmul(norm, x), w));
}

// h_i = relu(sum_r mean_{j in N_r(i)} x_j W_r + x_i W_self), node by node.
inline Mat rgcn(const std::vector<Mat>& adjs, const Mat& x, const std::vector<Mat>& wr, const Mat& wself) {
  const std::size_t n = x.size(), d = wself[0].size(), f = x[0].size();
  Mat h(n, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      double acc = 0;
      for (std::size_t k = 0; k < f; ++k) acc += x[i][k] * wself[k][c];
      for (std::size_t r = 0; r < adjs.size(); ++r) {
        double cnt = 0, sum = 0;
        for (std::size_t j = 0; j < n; ++j)
          if (adjs[r][i][j] != 0) {
            cnt += 1;
            for (std::size_t k = 0; k < f; ++k) sum += x[j][k] * wr[r][k][c];
          }
        if (cnt > 0) acc += sum / cnt;
      }
      h[i][c] = std::max(acc, 0.0);
    }
  }
  return h;
}

struct Item {
  std::int64_t id;
  double score;
  int label;
};

// Strict total ranking: descending score, then ascending id.
inline std::vector<Item> ranked(std::vector<Item> items) {
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.score > b.score) return true;
    if (a.score < b.score) return false;
    return a.id < b.id;
  });
  return items;
}

// Average precision from the full precision/recall curve over every cut of the
// ranking: sum_k (R_k - R_{k-1}) P_k.
inline double average_precision(const std::vector<Item>& items) {
  const auto r = ranked(items);
  double total_pos = 0;
  for (const auto& it : r) total_pos += it.label;
  double ap = 0, prev_recall = 0;
  for (std::size_t k = 1; k <= r.size(); ++k) {
    double tp = 0;
    for (std::size_t i = 0; i < k; ++i) tp += r[i].label;
    const double precision = tp / static_cast<double>(k);
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

inline double f1(const std::vector<Item>& items, double threshold) {
  double tp = 0, fp = 0, fn = 0;
  for (const auto& it : items) {
    const bool flag = it.score >= threshold;
    tp += flag && it.label;
    fp += flag && !it.label;
    fn += !flag && it.label;
  }
  if (tp == 0) return 0.0;
  const double p = tp / (tp + fp), rc = tp / (tp + fn);
  return 2 * p * rc / (p + rc);
}

// F1 as an exact fraction 2TP / (2TP + FP + FN), for tie-exact comparisons.
inline std::pair<long, long> f1_fraction(const std::vector<Item>& items, double threshold) {
  long tp = 0, fp = 0, fn = 0;
  for (const auto& it : items) {
    const bool flag = it.score >= threshold;
    tp += flag && it.label;
    fp += flag && !it.label;
    fn += !flag && it.label;
  }
  return {2 * tp, 2 * tp + fp + fn};
}

// Candidate thresholds are midpoints of consecutive distinct scores; the
// lowest candidate achieving the best F1 wins. A single distinct score returns
// that score.
inline double best_threshold(const std::vector<Item>& items) {
  std::vector<double> s;
  for (const auto& it : items) s.push_back(it.score);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (s.size() == 1) return s[0];
  double best = 0;
  std::pair<long, long> best_f1{-1, 1};
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double t = (s[i] + s[i + 1]) / 2;
    auto v = f1_fraction(items, t);
    if (v.second == 0) v = {0, 1};
    if (v.first * best_f1.second > best_f1.first * v.second) {
      best_f1 = v;
      best = t;
    }
  }
  return best;
}

// NPr@k; negative return means absent (no fraud on the day).
inline double npr(const std::vector<Item>& items, int k) {
  const auto r = ranked(items);
  const int kk = std::min<int>(k, static_cast<int>(r.size()));
  double frauds = 0, tp = 0;
  for (const auto& it : r) frauds += it.label;
  for (int i = 0; i < kk; ++i) tp += r[i].label;
  if (frauds == 0) return -1;
  const double gamma = frauds >= kk ? 1.0 : frauds / kk;
  return (tp / kk) / gamma;
}

}  // namespace oracle
