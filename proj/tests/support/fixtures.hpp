#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "graphguard/transactions.hpp"

namespace fixture {

inline graphguard::Transaction tx(std::int64_t id, std::int64_t time, std::string card, std::string merchant = "m",
                                  double amount = 1.0, int label = 0) {
  graphguard::Transaction t;
  t.tx_id = id;
  t.time = time;
  t.card_id = std::move(card);
  t.merchant_id = std::move(merchant);
  t.numeric["amount"] = amount;
  t.label = label;
  return t;
}

// Random rows over a few cards and merchants, spread over n_days days.
inline std::vector<graphguard::Transaction> random_rows(std::size_t n, int n_days, std::uint64_t seed, int cards = 12,
                                                        int merchants = 9) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::int64_t> time(0, static_cast<std::int64_t>(n_days) * 86400 - 1);
  std::uniform_int_distribution<int> card(0, cards - 1), merchant(0, merchants - 1);
  std::uniform_real_distribution<double> amount(1, 100);
  std::bernoulli_distribution fraud(0.1);
  std::vector<graphguard::Transaction> rows;
  for (std::size_t i = 0; i < n; ++i) {
    // Coarse times so equal timestamps occur.
    auto t = fixture::tx(static_cast<std::int64_t>(i + 1), time(gen) / 600 * 600, "c" + std::to_string(card(gen)),
                         "m" + std::to_string(merchant(gen)), amount(gen), fraud(gen) ? 1 : 0);
    t.categorical["category"] = "k" + std::to_string(merchant(gen) % 4);
    rows.push_back(t);
  }
  return rows;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("graphguard_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace fixture
