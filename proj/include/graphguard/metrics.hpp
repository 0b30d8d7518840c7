#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace graphguard {

struct ScoredTx {
  std::int64_t tx_id = 0;
  double score = 0;  // anomaly score, higher = more suspicious
  int label = 0;
};

struct ScoredDay {
  int day = 0;
  std::vector<ScoredTx> items;
};

// Mean over rounds of (s_neg - s_pos).
double anomaly_score(std::span<const double> negative_scores, std::span<const double> positive_scores);

// Ranking shared by every ranking metric: descending score, then ascending tx_id.
std::vector<ScoredTx> rank_by_score(std::span<const ScoredTx> items);

// Average precision (step-wise, no interpolation). Throws UndefinedMetric
// without at least one positive and one negative.
double pr_auc(std::span<const ScoredTx> items);

// Items with score >= threshold are flagged. Zero denominators give 0.
double f1_at(std::span<const ScoredTx> items, double threshold);

// Midpoint between consecutive distinct scores maximizing F1; lowest on ties.
// With a single distinct score that score is returned (flag everything).
// Throws UndefinedMetric when there is no positive.
double select_threshold(std::span<const ScoredTx> validation);

struct AlertPrecision {
  int k = 0;       // effective k (truncated to the day size)
  int frauds = 0;  // |F_t|
  int true_positives = 0;
  double precision = 0;  // Pr@k
  double gamma = 0;
  std::optional<double> normalized;  // NPr@k; absent when the day has no fraud
};

AlertPrecision alert_precision(std::span<const ScoredTx> day, int k);

inline std::optional<double> npr_at_k(std::span<const ScoredTx> day, int k) {
  return alert_precision(day, k).normalized;
}

struct DayMetrics {
  int day = 0;
  int n = 0;
  int frauds = 0;
  double threshold = 0;
  std::optional<double> pr_auc;
  std::optional<double> f1;
  std::optional<double> npr;
};

// Population mean / standard deviation over the values that are present.
struct Stat {
  double mean = 0;
  double std = 0;
  int count = 0;
};

Stat summarize(std::span<const std::optional<double>> values);

struct MetricReport {
  int k = 100;
  std::vector<DayMetrics> days;
  Stat pr_auc;
  Stat f1;
  Stat npr;
};

MetricReport make_report(std::vector<DayMetrics> days, int k);

// Metrics for one scored day given a validation-selected threshold.
DayMetrics evaluate_day(const ScoredDay& day, double threshold, int k);

}  // namespace graphguard
