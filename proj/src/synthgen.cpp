#include "graphguard/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string_view>

#include "graphguard/error.hpp"
#include "graphguard/rng.hpp"

namespace graphguard {

namespace {

struct CategorySpec {
  std::string_view name;
  double genuine_weight;
  double fraud_weight;
};

// Spending categories; fraud concentrates on online shopping and POS grocery.
constexpr std::array<CategorySpec, 14> kCategories{{
    {"grocery_pos", 10, 25},
    {"gas_transport", 10, 3},
    {"home", 9, 2},
    {"shopping_pos", 9, 8},
    {"kids_pets", 8, 2},
    {"shopping_net", 7, 30},
    {"entertainment", 7, 2},
    {"food_dining", 7, 2},
    {"personal_care", 7, 2},
    {"health_fitness", 6, 1},
    {"misc_pos", 6, 3},
    {"misc_net", 5, 15},
    {"grocery_net", 4, 3},
    {"travel", 3, 2},
}};

std::size_t pick_weighted(Rng& rng, bool fraud) {
  double total = 0;
  for (const auto& c : kCategories) total += fraud ? c.fraud_weight : c.genuine_weight;
  double u = rng.uniform01() * total;
  for (std::size_t i = 0; i < kCategories.size(); ++i) {
    u -= fraud ? kCategories[i].fraud_weight : kCategories[i].genuine_weight;
    if (u < 0) return i;
  }
  return kCategories.size() - 1;
}

std::string make_id(char prefix, int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%05d", prefix, index);
  return buf;
}

double round_cents(double amount) { return std::round(amount * 100.0) / 100.0; }

struct Card {
  std::vector<int> preferred;
  double log_mean = 0;
};

}  // namespace

void GenConfig::validate() const {
  if (n_cards < 1 || n_merchants < 1 || n_days < 1 || preferred_merchants < 1)
    throw Error("generator counts must be >= 1");
  if (!(tx_per_card_per_day > 0)) throw Error("tx_per_card_per_day must be > 0");
  if (!(fraud_rate > 0 && fraud_rate < 1)) throw Error("fraud_rate must be in (0, 1)");
  if (!(burst_length >= 1)) throw Error("burst_length must be >= 1");
  if (!(burst_width_hours > 0) || burst_width_hours * 3600 >= n_days * static_cast<double>(kSecondsPerDay))
    throw Error("burst_width_hours must be positive and shorter than the dataset");
  if (genuine_log_sigma < 0 || fraud_log_sigma < 0 || card_log_spread < 0)
    throw Error("amount spreads must be non-negative");
  if (start_time < 0) throw Error("start_time must be >= 0");
  if (fraud_rate * expected_rows() < 1)
    throw Error("fraud_rate x expected volume < 1: no fraud can be realized");
}

TableSchema generator_schema() {
  TableSchema schema;
  schema.categorical = {"category"};
  schema.numeric = {"amount"};
  return schema;
}

TransactionTable generate(const GenConfig& config) {
  config.validate();
  Rng rng(config.seed);

  std::vector<std::size_t> merchant_category(config.n_merchants);
  std::vector<std::vector<int>> merchants_by_category(kCategories.size());
  for (int m = 0; m < config.n_merchants; ++m) {
    merchant_category[m] = pick_weighted(rng, false);
    merchants_by_category[merchant_category[m]].push_back(m);
  }

  std::vector<Card> cards(config.n_cards);
  const int n_preferred = std::min(config.preferred_merchants, config.n_merchants);
  for (auto& card : cards) {
    std::vector<int> all(config.n_merchants);
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < n_preferred; ++i) {
      const auto j = i + rng.uniform_index(all.size() - i);
      std::swap(all[i], all[j]);
    }
    card.preferred.assign(all.begin(), all.begin() + n_preferred);
    std::sort(card.preferred.begin(), card.preferred.end());
    card.log_mean = rng.normal(config.genuine_log_mean, config.card_log_spread);
  }

  struct Draft {
    std::int64_t time;
    int card;
    int merchant;
    double amount;
    int label;
  };
  std::vector<Draft> drafts;
  drafts.reserve(static_cast<std::size_t>(config.expected_rows() * 1.1) + 16);

  const double genuine_rate = config.tx_per_card_per_day * (1.0 - config.fraud_rate);
  for (int c = 0; c < config.n_cards; ++c) {
    const Card& card = cards[c];
    for (int d = 0; d < config.n_days; ++d) {
      const std::int64_t count = rng.poisson(genuine_rate);
      for (std::int64_t k = 0; k < count; ++k) {
        Draft tx;
        tx.time = config.start_time + d * kSecondsPerDay +
                  static_cast<std::int64_t>(rng.uniform_index(kSecondsPerDay));
        tx.card = c;
        // Mostly habitual merchants, occasionally somewhere new.
        tx.merchant = rng.uniform01() < 0.9
                          ? card.preferred[rng.uniform_index(card.preferred.size())]
                          : static_cast<int>(rng.uniform_index(config.n_merchants));
        tx.amount = round_cents(std::exp(rng.normal(card.log_mean, config.genuine_log_sigma)));
        tx.label = 0;
        drafts.push_back(tx);
      }
    }
  }

  // Fraud volume is fixed up front; episodes are drawn until it is exhausted.
  const auto fraud_target =
      static_cast<std::int64_t>(std::llround(config.fraud_rate * config.expected_rows()));
  const auto width = static_cast<std::int64_t>(config.burst_width_hours * 3600.0);
  const std::int64_t horizon = config.n_days * kSecondsPerDay - width;
  std::int64_t placed = 0;
  while (placed < fraud_target) {
    const std::int64_t length =
        std::min<std::int64_t>(1 + rng.poisson(config.burst_length - 1.0), fraud_target - placed);
    const int c = static_cast<int>(rng.uniform_index(config.n_cards));
    const std::int64_t start =
        config.start_time + static_cast<std::int64_t>(rng.uniform_index(horizon));
    std::vector<std::int64_t> offsets(length);
    for (auto& o : offsets) o = static_cast<std::int64_t>(rng.uniform_index(width + 1));
    std::sort(offsets.begin(), offsets.end());
    for (std::int64_t offset : offsets) {
      Draft tx;
      tx.time = start + offset;
      tx.card = c;
      const auto& pool = merchants_by_category[pick_weighted(rng, true)];
      std::vector<int> unfamiliar;
      for (int m : pool)
        if (!std::binary_search(cards[c].preferred.begin(), cards[c].preferred.end(), m))
          unfamiliar.push_back(m);
      tx.merchant = unfamiliar.empty()
                        ? static_cast<int>(rng.uniform_index(config.n_merchants))
                        : unfamiliar[rng.uniform_index(unfamiliar.size())];
      tx.amount = round_cents(std::exp(rng.normal(config.fraud_log_mean, config.fraud_log_sigma)));
      tx.label = 1;
      drafts.push_back(tx);
    }
    placed += length;
  }

  std::stable_sort(drafts.begin(), drafts.end(),
                   [](const Draft& a, const Draft& b) { return a.time < b.time; });
  std::vector<Transaction> rows;
  rows.reserve(drafts.size());
  std::int64_t next_id = 1;
  for (const auto& draft : drafts) {
    Transaction tx;
    tx.tx_id = next_id++;
    tx.time = draft.time;
    tx.card_id = make_id('C', draft.card);
    tx.merchant_id = make_id('M', draft.merchant);
    tx.categorical["category"] = std::string(kCategories[merchant_category[draft.merchant]].name);
    tx.numeric["amount"] = draft.amount;
    tx.label = draft.label;
    rows.push_back(std::move(tx));
  }
  return TransactionTable(std::move(rows));
}

}  // namespace graphguard
