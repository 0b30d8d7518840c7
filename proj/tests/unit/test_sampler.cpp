#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "graphguard/error.hpp"
#include "graphguard/rng.hpp"
#include "graphguard/sampler.hpp"

using namespace graphguard;

namespace {

GraphConfig card_graph() {
  GraphConfig c;
  c.relations = {"card_id"};
  c.features = {"amount"};
  return c;
}

// Within k standard deviations of a binomial proportion.
bool near(double count, double n, double p, double k = 3.0) {
  return std::abs(count - n * p) <= k * std::sqrt(n * p * (1 - p));
}

}  // namespace

TEST_CASE("epoch targets") {
  // 5 history nodes on day 0, 3 targets on day 1.
  std::vector<Transaction> hist, batch;
  for (int i = 0; i < 5; ++i) hist.push_back(fixture::tx(i + 1, 100 + i, "a"));
  for (int i = 0; i < 3; ++i) {
    auto t = fixture::tx(10 + i, 86400 + i, "a");
    t.day = 1;
    batch.push_back(t);
  }
  const auto g = TransactionGraph::build(batch, hist, card_graph());
  Rng rng(1), again(1);
  auto p = epoch_targets(g, rng);
  CHECK(p == epoch_targets(g, again));
  std::sort(p.begin(), p.end());
  CHECK(p == g.target_nodes());
  CHECK(p.size() == 3);

  SUBCASE("24 permutations of 4 targets are uniform") {
    std::vector<Transaction> four;
    for (int i = 0; i < 4; ++i) four.push_back(fixture::tx(i + 1, i, "a"));
    const auto g4 = TransactionGraph::build(four, {}, card_graph());
    std::map<std::vector<NodeId>, int> counts;
    Rng r(5);
    for (int e = 0; e < 1000; ++e) ++counts[epoch_targets(g4, r)];
    CHECK(counts.size() == 24);
    for (const auto& [perm, c] : counts) CHECK(near(c, 1000, 1.0 / 24));
  }
}

TEST_CASE("rwr on an isolated node returns the start") {
  std::vector<Transaction> b{fixture::tx(1, 0, "a"), fixture::tx(2, 5, "b")};
  const auto g = TransactionGraph::build(b, {}, card_graph());
  SamplerConfig s;
  s.subgraph_size = 4;
  Rng rng(2);
  CHECK(rwr_sample(g, 1, s, rng) == std::vector<NodeId>{1});
}

TEST_CASE("weighted star: weights 3 and 1") {
  // t_range = 4; node 3 (t=4) points at t=1 with weight 1 and at t=3 with weight 3.
  std::vector<Transaction> b{fixture::tx(9, 0, "z"), fixture::tx(1, 1, "a"), fixture::tx(2, 3, "a"),
                             fixture::tx(3, 4, "a")};
  const auto g = TransactionGraph::build(b, {}, card_graph());
  REQUIRE(g.out_weights(3, 0).size() == 2);
  CHECK(g.out_weights(3, 0)[0] == 1.0);
  CHECK(g.out_weights(3, 0)[1] == 3.0);
  SamplerConfig s;
  s.weighted = true;
  s.epsilon = 1e-12;
  Rng rng(3);
  int to_heavy = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto nodes = rwr_sample(g, 3, s, rng);
    REQUIRE(nodes.size() == 2);
    to_heavy += nodes[1] == 2;
  }
  CHECK(near(to_heavy, n, 0.75));
}

TEST_CASE("subgraph size 2 from a node with past neighbors") {
  TransactionTable t(fixture::random_rows(200, 2, 4));
  const auto g = TransactionGraph::build(t.batch_of_day(1), t.window_before(1, 1), card_graph());
  SamplerConfig s;
  Rng rng(4);
  for (NodeId v = 0; v < static_cast<NodeId>(g.num_nodes()); ++v) {
    const auto nodes = rwr_sample(g, v, s, rng);
    if (g.out_degree(v) == 0) {
      CHECK(nodes.size() == 1);
      continue;
    }
    REQUIRE(nodes.size() == 2);
    CHECK(nodes[0] == v);
    const auto nb = g.out_neighbors(v, 0);
    CHECK(std::find(nb.begin(), nb.end(), nodes[1]) != nb.end());
  }
}

TEST_CASE("walks never reach the future and respect the size cap") {
  TransactionTable t(fixture::random_rows(300, 3, 6, 4, 3));
  const auto g =
      TransactionGraph::build(t.batch_of_day(2), t.window_before(2, 2), GraphConfig{{"card_id", "merchant_id"}, {"amount"}, 7});
  SamplerConfig s;
  s.subgraph_size = 5;
  for (bool weighted : {false, true}) {
    s.weighted = weighted;
    Rng rng(weighted ? 8 : 9);
    for (NodeId v = 0; v < static_cast<NodeId>(g.num_nodes()); v += 7) {
      const auto nodes = rwr_sample(g, v, s, rng);
      CHECK(nodes.size() >= 1);
      CHECK(nodes.size() <= 5);
      for (std::size_t i = 1; i < nodes.size(); ++i) CHECK(nodes[i] < v);
    }
  }
}

TEST_CASE("pairs") {
  TransactionTable t(fixture::random_rows(200, 2, 12));
  const auto g = TransactionGraph::build(t.batch_of_day(1), t.window_before(1, 1), GraphConfig{{"card_id", "merchant_id"}, {"amount"}, 7});
  SamplerConfig s;
  Rng rng(13);
  const NodeId target = g.target_nodes().back();

  SUBCASE("positive pair starts at the anonymized target") {
    const auto p = make_pair(g, target, Polarity::kPositive, s, rng);
    CHECK(p.label == 1);
    CHECK(p.subgraph.nodes[0] == target);
    for (double x : p.subgraph.features.row(0)) CHECK(x == 0.0);
    CHECK(p.target_features[0] == g.features(target)[0]);
    CHECK(p.subgraph.relations.size() == 1);
    s.multi_relational = true;
    CHECK(make_pair(g, target, Polarity::kPositive, s, rng).subgraph.relations.size() == 2);
  }
  SUBCASE("negative start is uniform over the other nodes") {
    std::vector<int> counts(g.num_nodes(), 0);
    const int n = 10000;
    SamplerConfig one;
    one.subgraph_size = 1;
    for (int i = 0; i < n; ++i) {
      const auto p = make_pair(g, target, Polarity::kNegative, one, rng);
      CHECK(p.label == 0);
      ++counts[p.start];
    }
    CHECK(counts[target] == 0);
    // Chi-square goodness of fit against the uniform law, 3 sigma above its mean.
    const double df = static_cast<double>(g.num_nodes() - 2);
    const double expected = n / static_cast<double>(g.num_nodes() - 1);
    double chi2 = 0;
    for (NodeId v = 0; v < static_cast<NodeId>(g.num_nodes()); ++v)
      if (v != target) chi2 += (counts[v] - expected) * (counts[v] - expected) / expected;
    CHECK(chi2 < df + 3 * std::sqrt(2 * df));
  }
  SUBCASE("negative pair needs two nodes") {
    std::vector<Transaction> one{fixture::tx(1, 0, "a")};
    const auto g1 = TransactionGraph::build(one, {}, card_graph());
    CHECK_THROWS_AS(make_pair(g1, 0, Polarity::kNegative, s, rng), Error);
  }
  SUBCASE("debug dump") {
    std::ostringstream out;
    write_pair(out, g, make_pair(g, target, Polarity::kPositive, s, rng));
    CHECK(out.str().rfind("pair target=" + std::to_string(g.tx_id(target)), 0) == 0);
  }
}

TEST_CASE("unweighted sampling ignores weights") {
  // Same topology, different time gaps, hence different weights.
  std::vector<Transaction> a{fixture::tx(1, 0, "a"), fixture::tx(2, 10, "a"), fixture::tx(3, 15, "a"),
                             fixture::tx(4, 40, "a")};
  std::vector<Transaction> b{fixture::tx(1, 0, "a"), fixture::tx(2, 500, "a"), fixture::tx(3, 900, "a"),
                             fixture::tx(4, 901, "a")};
  const auto ga = TransactionGraph::build(a, {}, card_graph());
  const auto gb = TransactionGraph::build(b, {}, card_graph());
  SamplerConfig s;
  s.subgraph_size = 3;
  Rng ra(77), rb(77);
  for (int i = 0; i < 500; ++i) CHECK(rwr_sample(ga, 3, s, ra) == rwr_sample(gb, 3, s, rb));
}

TEST_CASE("config validation") {
  SamplerConfig s;
  s.restart_prob = 1.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = SamplerConfig{};
  s.subgraph_size = 0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = SamplerConfig{};
  s.epsilon = 0;
  CHECK_THROWS_AS(s.validate(), Error);
}
