#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "graphguard/error.hpp"
#include "graphguard/synthgen.hpp"

using namespace graphguard;

TEST_CASE("fixed seed gives byte-identical output") {
  GenConfig g;
  g.n_cards = 50;
  g.n_days = 10;
  g.seed = 7;
  const auto dir = fixture::temp_dir("gen_det");
  write_table(generate(g), dir / "a.csv", generator_schema());
  write_table(generate(g), dir / "b.csv", generator_schema());
  CHECK(fixture::read_text(dir / "a.csv") == fixture::read_text(dir / "b.csv"));
  g.seed = 8;
  write_table(generate(g), dir / "c.csv", generator_schema());
  CHECK(fixture::read_text(dir / "a.csv") != fixture::read_text(dir / "c.csv"));
}

TEST_CASE("realized fraud volume for 20,000 expected rows") {
  GenConfig g;
  g.n_cards = 200;
  g.n_days = 30;
  g.tx_per_card_per_day = 20000.0 / 6000.0;
  g.fraud_rate = 0.01;
  for (std::uint64_t seed : {1, 2, 3}) {
    g.seed = seed;
    const auto t = generate(g);
    long frauds = 0;
    for (const auto& tx : t.rows()) frauds += tx.label;
    // Fraud volume is round(rate * expected rows); the binomial band is [160, 240].
    CHECK(frauds >= 160);
    CHECK(frauds <= 240);
    const double realized = static_cast<double>(frauds) / static_cast<double>(t.size());
    CHECK(realized >= 0.8 * g.fraud_rate);
    CHECK(realized <= 1.2 * g.fraud_rate);
  }
}

TEST_CASE("every day is populated") {
  GenConfig g;
  g.n_cards = 100;
  g.n_days = 30;
  g.tx_per_card_per_day = 1.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    g.seed = seed;
    const auto t = generate(g);
    int max_day = 0;
    for (const auto& tx : t.rows()) max_day = std::max(max_day, tx.day);
    CHECK(max_day == 29);
    for (int d = 0; d < 30; ++d) CHECK_FALSE(t.batch_of_day(d).empty());
  }
}

TEST_CASE("fraud phenomenology") {
  GenConfig g;
  g.n_cards = 200;
  g.n_days = 20;
  g.fraud_rate = 0.02;
  g.seed = 4;
  const auto t = generate(g);
  double fraud_sum = 0, genuine_sum = 0;
  long frauds = 0, genuine = 0;
  std::map<std::string, std::set<std::string>> habitual;  // card -> merchants used by genuine txs
  for (const auto& tx : t.rows()) {
    if (tx.label) {
      fraud_sum += tx.value("amount");
      ++frauds;
    } else {
      genuine_sum += tx.value("amount");
      ++genuine;
      habitual[tx.card_id].insert(tx.merchant_id);
    }
  }
  CHECK(fraud_sum / frauds > 3 * genuine_sum / genuine);

  // Each fraud sits within the burst width of another fraud on the same card
  // unless its episode has length one, so most frauds have a close sibling.
  long clustered = 0;
  for (const auto& a : t.rows()) {
    if (!a.label) continue;
    for (const auto& b : t.rows())
      if (b.label && b.tx_id != a.tx_id && b.card_id == a.card_id &&
          std::abs(b.time - a.time) <= static_cast<std::int64_t>(g.burst_width_hours * 3600)) {
        ++clustered;
        break;
      }
  }
  CHECK(clustered > frauds / 2);

  CHECK(t.rows().front().categorical.count("category") == 1);
}

TEST_CASE("generator config errors") {
  GenConfig g;
  g.n_cards = 1;
  g.n_days = 1;
  g.tx_per_card_per_day = 1;
  g.fraud_rate = 0.5;
  CHECK_THROWS_AS(generate(g), Error);  // 0.5 expected frauds
  g = GenConfig{};
  g.fraud_rate = 0;
  CHECK_THROWS_AS(generate(g), Error);
  g = GenConfig{};
  g.n_merchants = 0;
  CHECK_THROWS_AS(generate(g), Error);
}
