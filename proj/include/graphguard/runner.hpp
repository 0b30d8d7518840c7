#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "graphguard/config.hpp"
#include "graphguard/encoding.hpp"
#include "graphguard/metrics.hpp"
#include "graphguard/nn.hpp"
#include "graphguard/txgraph.hpp"

namespace graphguard {

inline constexpr const char* kVersion = "graphguard 0.1.0";

// One method row of the ablation table.
struct Variant {
  std::string relation_set;  // "Card ID" or "Card ID + Merchant ID"
  std::vector<std::string> relations;
  int theta = 7;
  bool weighted = false;
  bool multi_relational = false;

  std::string method() const;  // "GG", "GG+WS", "GG+MR", "GG+WS+MR"
  std::string slug() const;    // filesystem-safe identifier
};

// The variant described by the [graph] and [sampler] sections.
Variant configured_variant(const ExperimentConfig& config);

// The 8 grid rows: {GG, +WS, +MR, +WS+MR} x {Card ID, Card ID + Merchant ID}.
std::vector<Variant> grid_variants(const ExperimentConfig& config);

SamplerConfig sampler_for(const ExperimentConfig& config, const Variant& variant);
TrainConfig train_config_for(const ExperimentConfig& config, const Variant& variant, std::uint64_t seed);

// Encoders fitted on train + validation days and one graph per train,
// validation and test day. Independent of seed and of WS/MR switches.
struct PreparedSplit {
  SplitTriple split;
  Encoders encoders;
  std::vector<TransactionGraph> train_graphs;
  std::vector<TransactionGraph> val_graphs;
  TransactionGraph test_graph;
};

PreparedSplit prepare_split(const TransactionTable& table, const ExperimentConfig& config, const SplitTriple& split,
                            const Variant& variant);

// Multi-round anomaly scores of every target-day node. Each node draws from
// its own stream, so the result does not depend on iteration order.
ScoredDay score_graph(const TransactionGraph& graph, const ModelParams& params, const SamplerConfig& sampler,
                      std::uint64_t seed);

struct SplitResult {
  Variant variant;
  int split_index = 0;
  SplitTriple split;
  std::uint64_t seed = 0;
  ModelParams params;
  std::vector<double> loss;
  std::vector<ScoredDay> val_days;
  ScoredDay test_day;
  double threshold = 0;
  DayMetrics test_metrics;
  std::vector<std::string> notes;  // metrics reported absent and why
};

// Train on the split's train days, pick the F1 threshold on validation, score
// the test day.
SplitResult run_split(const PreparedSplit& prepared, const ExperimentConfig& config, const Variant& variant,
                      int split_index, std::uint64_t seed);

// Same, from scratch, for the configured variant.
SplitResult run_split(const TransactionTable& table, const ExperimentConfig& config, int split_index,
                      std::uint64_t seed);

// Scores a split with given parameters (no training).
SplitResult score_split(const PreparedSplit& prepared, const ExperimentConfig& config, const Variant& variant,
                        int split_index, std::uint64_t seed, ModelParams params);

struct CellSummary {
  int split_index = 0;
  int test_day = 0;
  std::uint64_t seed = 0;
  double threshold = 0;
  DayMetrics metrics;
  std::string error;  // nonempty when the cell failed
};

struct VariantRow {
  Variant variant;
  MetricReport report;  // one entry per successful (split, seed) cell
  std::vector<CellSummary> cells;
  // Spread of per-day means across test days, and of per-seed means across seeds.
  Stat pr_auc_across_days, f1_across_days, npr_across_days;
  Stat pr_auc_across_seeds, f1_across_seeds, npr_across_seeds;
};

VariantRow summarize_cells(const Variant& variant, std::vector<CellSummary> cells, int k);

struct GridResult {
  int k = 100;
  std::vector<VariantRow> rows;
};

struct RunOptions {
  std::filesystem::path output_dir;  // empty: keep results in memory only
};

// All splits x seeds of the given variants. Cell failures are recorded and
// the run continues.
GridResult run_variants(const TransactionTable& table, const ExperimentConfig& config,
                        const std::vector<Variant>& variants, const RunOptions& options = {});

GridResult run_grid(const TransactionTable& table, const ExperimentConfig& config, const RunOptions& options = {});

// ---- persistence ----

void write_scores(const std::filesystem::path& path, const std::vector<ScoredDay>& days);
std::vector<ScoredDay> read_scores(const std::filesystem::path& path);
void write_loss(const std::filesystem::path& path, const std::vector<double>& loss);

// Table layout: relations, GG, WS, MR, PR-AUC, F1-Score, NPr@k as
// "mean ± std" in percent.
std::string render_table(const GridResult& result);
std::string results_json(const GridResult& result);
GridResult parse_results_json(const std::string& text);

void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& config, const std::string& command);

}  // namespace graphguard
