#pragma once

#include <cstdint>

#include "graphguard/transactions.hpp"

namespace graphguard {

// Parameters of the synthetic card-transaction generator. Genuine spending
// follows per-card habits (preferred merchants, card-specific amount level);
// fraud arrives as short bursts on compromised cards at unfamiliar merchants
// with a shifted amount distribution.
struct GenConfig {
  int n_cards = 200;
  int n_merchants = 400;
  int n_days = 30;
  double tx_per_card_per_day = 3.3;  // Poisson mean
  double fraud_rate = 0.01;
  double burst_length = 4.0;         // mean frauds per episode
  double burst_width_hours = 3.0;    // every episode fits in this span
  int preferred_merchants = 8;
  double genuine_log_mean = 3.5;
  double genuine_log_sigma = 0.5;
  double card_log_spread = 0.6;      // sd of the per-card shift of genuine_log_mean
  double fraud_log_mean = 5.5;
  double fraud_log_sigma = 0.6;
  std::int64_t start_time = 1577836800;  // 2020-01-01T00:00:00Z
  std::uint64_t seed = 1;

  void validate() const;
  double expected_rows() const { return n_cards * static_cast<double>(n_days) * tx_per_card_per_day; }
};

// Columns written by the generator: tx_id,time,card_id,merchant_id,category,amount,label.
TableSchema generator_schema();

TransactionTable generate(const GenConfig& config);

}  // namespace graphguard
