#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "graphguard/encoding.hpp"
#include "graphguard/error.hpp"

using namespace graphguard;

namespace {

std::vector<Transaction> with_amounts(const std::vector<double>& xs) {
  std::vector<Transaction> rows;
  for (std::size_t i = 0; i < xs.size(); ++i) rows.push_back(fixture::tx(static_cast<std::int64_t>(i + 1), 0, "c", "m", xs[i]));
  return rows;
}

}  // namespace

TEST_CASE("risk is the fraud ratio per category") {
  std::vector<Transaction> rows;
  for (int i = 0; i < 10; ++i) {
    auto t = fixture::tx(i + 1, i, "c", "m", 1, i < 2 ? 1 : 0);
    t.categorical["category"] = "A";
    rows.push_back(t);
  }
  const auto enc = RiskEncoder::fit(rows, {"category"});
  CHECK(enc.risk("category", "A") == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(enc.risk("category", "never-seen") == 1.0);
  CHECK_THROWS_AS(RiskEncoder::fit(std::vector<Transaction>{}, {"category"}), Error);
}

TEST_CASE("risk table matches an independent group-by") {
  const auto rows = fixture::random_rows(200, 3, 17);
  const auto enc = RiskEncoder::fit(rows, {"category", "merchant_id"});
  for (const std::string field : {"category", "merchant_id"}) {
    std::map<std::string, double> fraud, total;
    for (const auto& tx : rows) {
      const std::string v = field == "category" ? tx.categorical.at("category") : tx.merchant_id;
      fraud[v] += tx.label;
      total[v] += 1;
    }
    CHECK(enc.table().at(field).size() == total.size());
    for (const auto& [v, n] : total) {
      const double r = enc.risk(field, v);
      CHECK(r == fraud[v] / n);
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
  }
  Transaction t = rows.front();
  enc.apply(t);
  const double once = t.numeric.at("category_risk");
  enc.apply(t);
  CHECK(t.numeric.at("category_risk") == once);
}

TEST_CASE("z-score normalization") {
  SUBCASE("values [0, 2] map to [-1, 1]") {
    const auto n = Normalizer::fit(with_amounts({0, 2}), {"amount"});
    CHECK(n.apply("amount", 0) == -1.0);
    CHECK(n.apply("amount", 2) == 1.0);
  }
  SUBCASE("constant column maps to zeros") {
    const auto n = Normalizer::fit(with_amounts({5, 5, 5}), {"amount"});
    CHECK(n.moments("amount").constant);
    CHECK(n.moments("amount").sigma == Normalizer::kMinSigma);
    for (double x : {5.0, 5.0, 5.0}) CHECK(n.apply("amount", x) == 0.0);
  }
  SUBCASE("fewer than two rows is an error") {
    CHECK_THROWS_AS(Normalizer::fit(with_amounts({1}), {"amount"}), Error);
  }
  SUBCASE("1,000 normals standardize to mean 0 and sigma 1") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd(12.0, 4.0);
    std::vector<double> xs(1000);
    for (auto& x : xs) x = nd(gen);
    const auto n = Normalizer::fit(with_amounts(xs), {"amount"});
    double sum = 0, sq = 0;
    for (double x : xs) sum += n.apply("amount", x);
    const double mean = sum / 1000;
    for (double x : xs) sq += (n.apply("amount", x) - mean) * (n.apply("amount", x) - mean);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(sq / 1000) - 1.0) < 1e-9);
  }
}

TEST_CASE("encoders transform a table and write an audit file") {
  auto rows = fixture::random_rows(100, 2, 5);
  const auto enc = Encoders::fit(rows, {"category"}, {"amount"});
  const auto table = enc.encode(rows, 0);
  for (const auto& tx : table.rows()) {
    CHECK(tx.numeric.count("category_risk") == 1);
    CHECK(std::isfinite(tx.value("amount")));
  }
  const auto dir = fixture::temp_dir("enc_audit");
  enc.save(dir / "enc.txt");
  const std::string text = fixture::read_text(dir / "enc.txt");
  CHECK(text.find("risk.default = 1\n") != std::string::npos);
  CHECK(text.find("norm.amount.mean = ") != std::string::npos);
  CHECK(text.find("norm.amount.sigma = ") != std::string::npos);
  CHECK(text.find("risk.category.k0 = ") != std::string::npos);
}

TEST_CASE("rolling splits") {
  SUBCASE("10 days, eta 7, one validation day, two test days") {
    const auto plan = make_splits(10, 7, 1, 2);
    REQUIRE(plan.splits.size() == 2);
    CHECK(plan.splits[0].test_day == 8);
    CHECK(plan.splits[1].test_day == 9);
    CHECK(plan.splits[0].val_days == std::vector<int>{7});
    CHECK(plan.splits[0].train_days == std::vector<int>{0, 1, 2, 3, 4, 5, 6});
    CHECK(plan.splits[1].train_days == std::vector<int>{1, 2, 3, 4, 5, 6, 7});
  }
  SUBCASE("exact fit yields one triple") {
    CHECK(make_splits(7 + 1 + 1, 7, 1, 1).splits.size() == 1);
  }
  SUBCASE("5 and 9 test-day plans") {
    CHECK(make_splits(60, 7, 1, 5).splits.size() == 5);
    CHECK(make_splits(60, 7, 1, 9).splits.size() == 9);
  }
  SUBCASE("too few days names the minimum") {
    try {
      make_splits(8, 7, 1, 2);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("at least 10") != std::string::npos);
    }
  }
  SUBCASE("ordering and disjointness") {
    const auto plan = make_splits(40, 9, 3, 6);
    for (std::size_t k = 0; k < plan.splits.size(); ++k) {
      const auto& s = plan.splits[k];
      CHECK(s.train_days.size() == 9);
      CHECK(s.val_days.size() == 3);
      CHECK(s.train_days.back() < s.val_days.front());
      CHECK(s.val_days.back() < s.test_day);
      if (k > 0) {
        CHECK(s.test_day == plan.splits[k - 1].test_day + 1);
        CHECK(s.train_days.front() == plan.splits[k - 1].train_days.front() + 1);
      }
      std::set<int> all(s.train_days.begin(), s.train_days.end());
      all.insert(s.val_days.begin(), s.val_days.end());
      all.insert(s.test_day);
      CHECK(all.size() == 13);
    }
  }
}
