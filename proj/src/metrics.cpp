#include "graphguard/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "graphguard/error.hpp"

namespace graphguard {

double anomaly_score(std::span<const double> negative_scores, std::span<const double> positive_scores) {
  if (negative_scores.empty() || negative_scores.size() != positive_scores.size())
    throw Error("anomaly_score: need equal, nonzero numbers of rounds");
  double total = 0;
  for (std::size_t r = 0; r < negative_scores.size(); ++r) total += negative_scores[r] - positive_scores[r];
  return total / static_cast<double>(negative_scores.size());
}

std::vector<ScoredTx> rank_by_score(std::span<const ScoredTx> items) {
  std::vector<ScoredTx> ranked(items.begin(), items.end());
  std::sort(ranked.begin(), ranked.end(), [](const ScoredTx& a, const ScoredTx& b) {
    return a.score != b.score ? a.score > b.score : a.tx_id < b.tx_id;
  });
  return ranked;
}

double pr_auc(std::span<const ScoredTx> items) {
  long positives = 0;
  for (const auto& it : items) positives += it.label;
  if (positives == 0) throw UndefinedMetric("pr_auc: undefined metric, no positive labels");
  if (positives == static_cast<long>(items.size()))
    throw UndefinedMetric("pr_auc: undefined metric, no negative labels");
  const auto ranked = rank_by_score(items);
  double ap = 0;
  long hits = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (!ranked[i].label) continue;
    ++hits;
    // Recall rises by 1/P at each hit; precision at that cut is hits/(i+1).
    ap += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return ap / static_cast<double>(positives);
}

double f1_at(std::span<const ScoredTx> items, double threshold) {
  long tp = 0, fp = 0, fn = 0;
  for (const auto& it : items) {
    const bool flagged = it.score >= threshold;
    if (flagged && it.label) ++tp;
    else if (flagged) ++fp;
    else if (it.label) ++fn;
  }
  const long denom = 2 * tp + fp + fn;
  return denom == 0 || tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

double select_threshold(std::span<const ScoredTx> validation) {
  long positives = 0;
  for (const auto& it : validation) positives += it.label;
  if (positives == 0) throw UndefinedMetric("select_threshold: validation has no positive labels");

  std::vector<double> scores;
  for (const auto& it : validation) scores.push_back(it.score);
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
  if (scores.size() < 2) return scores.front();

  // Sweep midpoints from low to high, updating counts incrementally. The
  // candidate between scores[c] and scores[c+1] flags everything above scores[c].
  const auto ranked = rank_by_score(validation);  // descending
  std::vector<long> tp_above(scores.size(), 0), fp_above(scores.size(), 0);
  {
    // counts of items with score strictly greater than scores[c]
    long tp = 0, fp = 0;
    std::size_t r = 0;
    for (std::size_t c = scores.size(); c-- > 0;) {
      tp_above[c] = tp;
      fp_above[c] = fp;
      while (r < ranked.size() && ranked[r].score >= scores[c]) {
        if (ranked[r].label) ++tp;
        else ++fp;
        ++r;
      }
    }
  }
  double best_f1 = -1;
  double best = 0;
  for (std::size_t c = 0; c + 1 < scores.size(); ++c) {
    const long tp = tp_above[c];
    const long fp = fp_above[c];
    const long fn = positives - tp;
    const double f1 = tp == 0 ? 0.0 : 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
    if (f1 > best_f1) {
      best_f1 = f1;
      best = 0.5 * (scores[c] + scores[c + 1]);
    }
  }
  return best;
}

AlertPrecision alert_precision(std::span<const ScoredTx> day, int k) {
  if (k <= 0) throw Error("npr_at_k: k must be >= 1");
  if (day.empty()) throw Error("npr_at_k: empty day");
  AlertPrecision out;
  out.k = k;
  if (static_cast<std::size_t>(k) > day.size()) {
    out.k = static_cast<int>(day.size());
    warn("npr_at_k: day has " + std::to_string(day.size()) + " transactions < k=" + std::to_string(k) +
         "; k truncated");
  }
  for (const auto& it : day) out.frauds += it.label;
  const auto ranked = rank_by_score(day);
  for (int i = 0; i < out.k; ++i) out.true_positives += ranked[i].label;
  out.precision = static_cast<double>(out.true_positives) / out.k;
  if (out.frauds == 0) return out;
  out.gamma = out.frauds >= out.k ? 1.0 : static_cast<double>(out.frauds) / out.k;
  out.normalized = out.precision / out.gamma;
  return out;
}

Stat summarize(std::span<const std::optional<double>> values) {
  Stat s;
  double sum = 0;
  for (const auto& v : values)
    if (v) {
      sum += *v;
      ++s.count;
    }
  if (s.count == 0) return s;
  s.mean = sum / s.count;
  double sq = 0;
  for (const auto& v : values)
    if (v) sq += (*v - s.mean) * (*v - s.mean);
  s.std = std::sqrt(sq / s.count);
  return s;
}

MetricReport make_report(std::vector<DayMetrics> days, int k) {
  MetricReport report;
  report.k = k;
  report.days = std::move(days);
  std::vector<std::optional<double>> pr, f1, npr;
  for (const auto& d : report.days) {
    pr.push_back(d.pr_auc);
    f1.push_back(d.f1);
    npr.push_back(d.npr);
  }
  report.pr_auc = summarize(pr);
  report.f1 = summarize(f1);
  report.npr = summarize(npr);
  return report;
}

DayMetrics evaluate_day(const ScoredDay& day, double threshold, int k) {
  DayMetrics m;
  m.day = day.day;
  m.n = static_cast<int>(day.items.size());
  for (const auto& it : day.items) m.frauds += it.label;
  m.threshold = threshold;
  if (m.frauds > 0 && m.frauds < m.n) m.pr_auc = pr_auc(day.items);
  if (m.frauds > 0) m.f1 = f1_at(day.items, threshold);
  if (!day.items.empty()) m.npr = npr_at_k(day.items, k);
  return m;
}

}  // namespace graphguard
