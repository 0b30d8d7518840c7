#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "graphguard/nn.hpp"
#include "graphguard/sampler.hpp"
#include "graphguard/synthgen.hpp"
#include "graphguard/transactions.hpp"
#include "graphguard/txgraph.hpp"

namespace graphguard {

struct DataConfig {
  std::string path;  // empty: synthesize from [generator]
  TableSchema schema = generator_schema();
};

struct EncodingConfig {
  std::vector<std::string> risk_fields{"category"};
  std::vector<std::string> numeric_fields{"amount"};
};

struct EvalConfig {
  int eta = 7;
  int n_val = 1;
  int n_test_days = 9;
  int k = 100;
};

// Relation sets and their history windows for the ablation grid.
struct GridConfig {
  std::string card_field = "card_id";
  std::string merchant_field = "merchant_id";
  int theta_card = 30;
  int theta_card_merchant = 7;
};

// Everything an experiment needs. Loaded from an INI file with sections
// [data] [generator] [encoding] [graph] [sampler] [train] [eval] [grid]
// [output]; unknown sections or keys are rejected.
struct ExperimentConfig {
  DataConfig data;
  GenConfig generator;
  EncodingConfig encoding;
  GraphConfig graph{{"card_id", "merchant_id"}, {}, 7};
  SamplerConfig sampler;
  TrainConfig train;
  std::vector<std::uint64_t> seeds{0};
  int rgcn_batch_size = 0;     // 0: same as train.batch_size
  int rgcn_embedding_dim = 0;  // 0: same as train.embedding_dim
  EvalConfig eval;
  GridConfig grid;
  std::string output_dir = "runs";

  static ExperimentConfig load(const std::filesystem::path& path);

  // Strict single-key update, e.g. set("train", "epochs", "100").
  void set(const std::string& section, const std::string& key, const std::string& value);
  std::string get(const std::string& section, const std::string& key) const;

  // All keys as "section.key" in a fixed order.
  static std::vector<std::string> keys();

  std::string to_ini() const;
  void validate() const;

  // Output directory, prefixed by $GRAPHGUARD_OUTPUT_ROOT when that is set
  // and output_dir is relative.
  std::filesystem::path output_path() const;
};

TransactionTable load_dataset(const ExperimentConfig& config);

}  // namespace graphguard
