#include "graphguard/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "csv.hpp"
#include "graphguard/error.hpp"
#include "graphguard/rng.hpp"
#include "json.hpp"

namespace graphguard {

namespace {

constexpr std::uint64_t kScoreStream = 0x5c07e;

std::vector<std::string> default_features(const ExperimentConfig& config) {
  if (!config.graph.features.empty()) return config.graph.features;
  std::vector<std::string> f = config.encoding.numeric_fields;
  for (const auto& field : config.encoding.risk_fields) f.push_back(RiskEncoder::column_name(field));
  return f;
}

}  // namespace

std::string Variant::method() const {
  std::string m = "GG";
  if (weighted) m += "+WS";
  if (multi_relational) m += "+MR";
  return m;
}

std::string Variant::slug() const {
  std::string s;
  for (std::size_t i = 0; i < relations.size(); ++i) s += (i ? "-" : "") + relations[i];
  s += "_theta" + std::to_string(theta) + "_" + method();
  std::replace(s.begin(), s.end(), '+', '_');
  return s;
}

Variant configured_variant(const ExperimentConfig& config) {
  Variant v;
  for (std::size_t i = 0; i < config.graph.relations.size(); ++i) {
    const auto& r = config.graph.relations[i];
    const std::string label = r == config.grid.card_field       ? "Card ID"
                              : r == config.grid.merchant_field ? "Merchant ID"
                                                                : r;
    v.relation_set += (i ? " + " : "") + label;
  }
  v.relations = config.graph.relations;
  v.theta = config.graph.theta;
  v.weighted = config.sampler.weighted;
  v.multi_relational = config.sampler.multi_relational;
  return v;
}

std::vector<Variant> grid_variants(const ExperimentConfig& config) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> sets = {
      {"Card ID", {config.grid.card_field}},
      {"Card ID + Merchant ID", {config.grid.card_field, config.grid.merchant_field}},
  };
  std::vector<Variant> out;
  for (const auto& [name, relations] : sets)
    for (bool mr : {false, true})
      for (bool ws : {false, true}) {
        Variant v;
        v.relation_set = name;
        v.relations = relations;
        v.theta = relations.size() == 1 ? config.grid.theta_card : config.grid.theta_card_merchant;
        v.weighted = ws;
        v.multi_relational = mr;
        out.push_back(v);
      }
  return out;
}

SamplerConfig sampler_for(const ExperimentConfig& config, const Variant& variant) {
  SamplerConfig s = config.sampler;
  s.weighted = variant.weighted;
  s.multi_relational = variant.multi_relational;
  return s;
}

TrainConfig train_config_for(const ExperimentConfig& config, const Variant& variant, std::uint64_t seed) {
  TrainConfig t = config.train;
  t.seed = seed;
  if (variant.multi_relational) {
    if (config.rgcn_batch_size > 0) t.batch_size = config.rgcn_batch_size;
    if (config.rgcn_embedding_dim > 0) t.embedding_dim = config.rgcn_embedding_dim;
  }
  return t;
}

PreparedSplit prepare_split(const TransactionTable& table, const ExperimentConfig& config, const SplitTriple& split,
                            const Variant& variant) {
  if (split.train_days.empty()) throw Error("split has no training days");
  const int first_fit = split.train_days.front();
  const int last_fit = split.val_days.empty() ? split.train_days.back() : split.val_days.back();
  if (last_fit >= split.test_day) throw Error("split: fit days must precede the test day");
  const auto fit_rows = table.days(first_fit, last_fit);
  if (fit_rows.size() < 2) throw Error("split: fewer than 2 rows to fit encoders on");

  PreparedSplit prepared;
  prepared.split = split;
  prepared.encoders = Encoders::fit(fit_rows, config.encoding.risk_fields, config.encoding.numeric_fields);
  const TransactionTable encoded =
      prepared.encoders.encode(table.days(first_fit - variant.theta, split.test_day), table.origin());

  GraphConfig gc;
  gc.relations = variant.relations;
  gc.features = default_features(config);
  gc.theta = variant.theta;
  auto graph_for = [&](int day) {
    return TransactionGraph::build(encoded.batch_of_day(day), encoded.window_before(day, gc.theta), gc);
  };
  for (int d : split.train_days) {
    if (encoded.batch_of_day(d).empty()) {
      warn("train day " + std::to_string(d) + " has no transactions; skipped");
      continue;
    }
    prepared.train_graphs.push_back(graph_for(d));
  }
  if (prepared.train_graphs.empty()) throw Error("split: every training day is empty");
  for (int d : split.val_days)
    if (!encoded.batch_of_day(d).empty()) prepared.val_graphs.push_back(graph_for(d));
  if (encoded.batch_of_day(split.test_day).empty())
    throw Error("split: test day " + std::to_string(split.test_day) + " has no transactions");
  prepared.test_graph = graph_for(split.test_day);
  return prepared;
}

ScoredDay score_graph(const TransactionGraph& graph, const ModelParams& params, const SamplerConfig& sampler,
                      std::uint64_t seed) {
  sampler.validate();
  ScoredDay out;
  const auto targets = graph.target_nodes();
  if (targets.empty()) throw Error("score_graph: no target-day nodes");
  out.day = graph.day(targets.front());
  std::vector<double> s_pos(sampler.rounds), s_neg(sampler.rounds);
  for (NodeId v : targets) {
    Rng rng(derive_seed(seed, {kScoreStream, static_cast<std::uint64_t>(graph.tx_id(v))}));
    for (int r = 0; r < sampler.rounds; ++r) {
      s_pos[r] = pair_score(params, make_pair(graph, v, Polarity::kPositive, sampler, rng));
      s_neg[r] = pair_score(params, make_pair(graph, v, Polarity::kNegative, sampler, rng));
    }
    out.items.push_back({graph.tx_id(v), anomaly_score(s_neg, s_pos), graph.label(v)});
  }
  return out;
}

SplitResult score_split(const PreparedSplit& prepared, const ExperimentConfig& config, const Variant& variant,
                        int split_index, std::uint64_t seed, ModelParams params) {
  const SamplerConfig sampler = sampler_for(config, variant);
  SplitResult result;
  result.variant = variant;
  result.split_index = split_index;
  result.split = prepared.split;
  result.seed = seed;
  result.params = std::move(params);

  std::vector<ScoredTx> validation;
  for (const auto& g : prepared.val_graphs) {
    result.val_days.push_back(score_graph(g, result.params, sampler, seed));
    const auto& items = result.val_days.back().items;
    validation.insert(validation.end(), items.begin(), items.end());
  }
  bool have_threshold = false;
  try {
    if (validation.empty()) throw UndefinedMetric("no validation transactions");
    result.threshold = select_threshold(validation);
    have_threshold = true;
  } catch (const UndefinedMetric& e) {
    result.notes.push_back(std::string("F1 absent: ") + e.what());
    result.threshold = std::nan("");
  }
  result.test_day = score_graph(prepared.test_graph, result.params, sampler, seed);
  result.test_metrics = evaluate_day(result.test_day, result.threshold, config.eval.k);
  if (!have_threshold) result.test_metrics.f1.reset();
  if (result.test_metrics.frauds == 0)
    result.notes.push_back("test day " + std::to_string(result.test_day.day) +
                           " has no fraud; PR-AUC, F1 and NPr@k absent");
  return result;
}

SplitResult run_split(const PreparedSplit& prepared, const ExperimentConfig& config, const Variant& variant,
                      int split_index, std::uint64_t seed) {
  TrainResult trained =
      train(prepared.train_graphs, sampler_for(config, variant), train_config_for(config, variant, seed));
  SplitResult result = score_split(prepared, config, variant, split_index, seed, std::move(trained.params));
  result.loss = std::move(trained.epoch_loss);
  return result;
}

SplitResult run_split(const TransactionTable& table, const ExperimentConfig& config, int split_index,
                      std::uint64_t seed) {
  const SplitPlan plan = make_splits(table.n_days(), config.eval.eta, config.eval.n_val, config.eval.n_test_days);
  if (split_index < 0 || static_cast<std::size_t>(split_index) >= plan.splits.size())
    throw Error("split index " + std::to_string(split_index) + " out of range");
  const Variant variant = configured_variant(config);
  const PreparedSplit prepared = prepare_split(table, config, plan.splits[split_index], variant);
  return run_split(prepared, config, variant, split_index, seed);
}

VariantRow summarize_cells(const Variant& variant, std::vector<CellSummary> cells, int k) {
  VariantRow row;
  row.variant = variant;
  row.cells = std::move(cells);
  std::vector<DayMetrics> ok;
  for (const auto& c : row.cells)
    if (c.error.empty()) ok.push_back(c.metrics);
  row.report = make_report(ok, k);

  auto spread = [&](auto key_of, auto metric) {
    std::map<std::uint64_t, std::vector<std::optional<double>>> groups;
    for (const auto& c : row.cells)
      if (c.error.empty()) groups[key_of(c)].push_back(metric(c.metrics));
    std::vector<std::optional<double>> means;
    for (const auto& [key, values] : groups) {
      const Stat s = summarize(values);
      means.push_back(s.count ? std::optional<double>(s.mean) : std::nullopt);
    }
    return summarize(means);
  };
  auto by_day = [](const CellSummary& c) { return static_cast<std::uint64_t>(c.test_day); };
  auto by_seed = [](const CellSummary& c) { return c.seed; };
  auto pr = [](const DayMetrics& m) { return m.pr_auc; };
  auto f1 = [](const DayMetrics& m) { return m.f1; };
  auto npr = [](const DayMetrics& m) { return m.npr; };
  row.pr_auc_across_days = spread(by_day, pr);
  row.f1_across_days = spread(by_day, f1);
  row.npr_across_days = spread(by_day, npr);
  row.pr_auc_across_seeds = spread(by_seed, pr);
  row.f1_across_seeds = spread(by_seed, f1);
  row.npr_across_seeds = spread(by_seed, npr);
  return row;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::optional<double> optional_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

nlohmann::ordered_json day_metrics_json(const DayMetrics& m) {
  nlohmann::ordered_json j;
  j["day"] = m.day;
  j["n"] = m.n;
  j["frauds"] = m.frauds;
  j["threshold"] = std::isfinite(m.threshold) ? nlohmann::ordered_json(m.threshold) : nlohmann::ordered_json(nullptr);
  j["pr_auc"] = optional_json(m.pr_auc);
  j["f1"] = optional_json(m.f1);
  j["npr"] = optional_json(m.npr);
  return j;
}

DayMetrics day_metrics_from(const nlohmann::json& j) {
  DayMetrics m;
  m.day = j.at("day").get<int>();
  m.n = j.at("n").get<int>();
  m.frauds = j.at("frauds").get<int>();
  m.threshold = j.at("threshold").is_null() ? std::nan("") : j.at("threshold").get<double>();
  m.pr_auc = optional_from(j.at("pr_auc"));
  m.f1 = optional_from(j.at("f1"));
  m.npr = optional_from(j.at("npr"));
  return m;
}

nlohmann::ordered_json stat_json(const Stat& s) { return {{"mean", s.mean}, {"std", s.std}, {"count", s.count}}; }

nlohmann::ordered_json cell_json(const Variant& v, const CellSummary& c) {
  nlohmann::ordered_json j;
  j["variant"] = v.slug();
  j["split"] = c.split_index;
  j["test_day"] = c.test_day;
  j["seed"] = c.seed;
  j["metrics"] = day_metrics_json(c.metrics);
  j["error"] = c.error;
  return j;
}

}  // namespace

GridResult run_variants(const TransactionTable& table, const ExperimentConfig& config,
                        const std::vector<Variant>& variants, const RunOptions& options) {
  config.validate();
  const SplitPlan plan = make_splits(table.n_days(), config.eval.eta, config.eval.n_val, config.eval.n_test_days);

  // Variants sharing relations and theta share encoders and graphs.
  std::map<std::pair<std::vector<std::string>, int>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < variants.size(); ++i)
    groups[{variants[i].relations, variants[i].theta}].push_back(i);

  std::vector<std::vector<CellSummary>> cells(variants.size());
  for (std::size_t s = 0; s < plan.splits.size(); ++s) {
    const SplitTriple& split = plan.splits[s];
    for (const auto& [key, members] : groups) {
      std::optional<PreparedSplit> prepared;
      std::string prepare_error;
      try {
        prepared = prepare_split(table, config, split, variants[members.front()]);
      } catch (const std::exception& e) {
        prepare_error = std::string("prepare split ") + std::to_string(s) + ": " + e.what();
        warn(prepare_error);
      }
      for (std::size_t vi : members) {
        const Variant& variant = variants[vi];
        for (std::uint64_t seed : config.seeds) {
          CellSummary cell;
          cell.split_index = static_cast<int>(s);
          cell.test_day = split.test_day;
          cell.seed = seed;
          if (!prepared) {
            cell.error = prepare_error;
            cells[vi].push_back(cell);
            continue;
          }
          try {
            info("running " + variant.slug() + " split " + std::to_string(s) + " seed " + std::to_string(seed));
            SplitResult r = run_split(*prepared, config, variant, static_cast<int>(s), seed);
            cell.metrics = r.test_metrics;
            cell.threshold = r.threshold;
            for (const auto& note : r.notes) info(variant.slug() + ": " + note);
            if (!options.output_dir.empty()) {
              const auto dir = options.output_dir / "cells" / variant.slug() /
                               ("split" + std::to_string(s) + "_seed" + std::to_string(seed));
              std::filesystem::create_directories(dir);
              std::vector<ScoredDay> days = r.val_days;
              days.push_back(r.test_day);
              write_scores(dir / "scores.csv", days);
              write_loss(dir / "loss.csv", r.loss);
              write_text(dir / "metrics.json", cell_json(variant, cell).dump(2) + "\n");
            }
          } catch (const std::exception& e) {
            cell.error = e.what();
            warn(variant.slug() + " split " + std::to_string(s) + " seed " + std::to_string(seed) +
                 " failed: " + e.what());
          }
          cells[vi].push_back(cell);
        }
      }
    }
  }

  GridResult result;
  result.k = config.eval.k;
  for (std::size_t i = 0; i < variants.size(); ++i)
    result.rows.push_back(summarize_cells(variants[i], std::move(cells[i]), config.eval.k));
  if (!options.output_dir.empty()) {
    std::filesystem::create_directories(options.output_dir);
    write_text(options.output_dir / "results.json", results_json(result));
    write_text(options.output_dir / "table.csv", render_table(result));
  }
  return result;
}

GridResult run_grid(const TransactionTable& table, const ExperimentConfig& config, const RunOptions& options) {
  return run_variants(table, config, grid_variants(config), options);
}

void write_scores(const std::filesystem::path& path, const std::vector<ScoredDay>& days) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "tx_id,day,score,label\n";
  for (const auto& day : days)
    for (const auto& it : day.items)
      out << it.tx_id << ',' << day.day << ',' << csv::format_double(it.score) << ',' << it.label << '\n';
}

std::vector<ScoredDay> read_scores(const std::filesystem::path& path) {
  TableSchema schema;
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (csv::trim_eol(line) != "tx_id,day,score,label") throw SchemaError(path.string() + ": unexpected header");
  std::vector<ScoredDay> days;
  while (std::getline(in, line)) {
    const auto f = csv::split(csv::trim_eol(line), ',');
    if (f.size() != 4) throw SchemaError(path.string() + ": malformed row");
    const int day = std::stoi(f[1]);
    if (days.empty() || days.back().day != day) days.push_back(ScoredDay{day, {}});
    days.back().items.push_back({std::stoll(f[0]), std::stod(f[2]), std::stoi(f[3])});
  }
  return days;
}

void write_loss(const std::filesystem::path& path, const std::vector<double>& loss) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < loss.size(); ++e) out << e + 1 << ',' << csv::format_double(loss[e]) << '\n';
}

std::string render_table(const GridResult& result) {
  auto cell = [](const Stat& s) {
    if (s.count == 0) return std::string("n/a");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f ± %.2f", 100.0 * s.mean, 100.0 * s.std);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "Graph Relations,GG,WS,MR,PR-AUC,F1-Score,NPr@" << result.k << '\n';
  int excluded = 0;
  int failed = 0;
  for (const auto& row : result.rows) {
    const Variant& v = row.variant;
    out << v.relation_set << ",x," << (v.weighted ? "x" : "") << ',' << (v.multi_relational ? "x" : "") << ','
        << cell(row.report.pr_auc) << ',' << cell(row.report.f1) << ',' << cell(row.report.npr) << '\n';
    for (const auto& c : row.cells) {
      if (!c.error.empty()) ++failed;
      else if (!c.metrics.npr) ++excluded;
    }
  }
  out << "# values in %, mean ± std over test days and seeds";
  if (excluded) out << "; " << excluded << " cell(s) without fraud excluded from averages";
  if (failed) out << "; " << failed << " cell(s) failed";
  out << '\n';
  return out.str();
}

std::string results_json(const GridResult& result) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["k"] = result.k;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : result.rows) {
    nlohmann::ordered_json r;
    const Variant& v = row.variant;
    r["relation_set"] = v.relation_set;
    r["relations"] = v.relations;
    r["theta"] = v.theta;
    r["weighted"] = v.weighted;
    r["multi_relational"] = v.multi_relational;
    r["method"] = v.method();
    r["pr_auc"] = stat_json(row.report.pr_auc);
    r["f1"] = stat_json(row.report.f1);
    r["npr"] = stat_json(row.report.npr);
    r["across_days"] = {{"pr_auc", stat_json(row.pr_auc_across_days)},
                        {"f1", stat_json(row.f1_across_days)},
                        {"npr", stat_json(row.npr_across_days)}};
    r["across_seeds"] = {{"pr_auc", stat_json(row.pr_auc_across_seeds)},
                         {"f1", stat_json(row.f1_across_seeds)},
                         {"npr", stat_json(row.npr_across_seeds)}};
    r["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : row.cells) r["cells"].push_back(cell_json(v, c));
    j["rows"].push_back(r);
  }
  return j.dump(2) + "\n";
}

GridResult parse_results_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  GridResult result;
  result.k = j.at("k").get<int>();
  for (const auto& r : j.at("rows")) {
    Variant v;
    v.relation_set = r.at("relation_set").get<std::string>();
    v.relations = r.at("relations").get<std::vector<std::string>>();
    v.theta = r.at("theta").get<int>();
    v.weighted = r.at("weighted").get<bool>();
    v.multi_relational = r.at("multi_relational").get<bool>();
    std::vector<CellSummary> cells;
    for (const auto& c : r.at("cells")) {
      CellSummary cell;
      cell.split_index = c.at("split").get<int>();
      cell.test_day = c.at("test_day").get<int>();
      cell.seed = c.at("seed").get<std::uint64_t>();
      cell.metrics = day_metrics_from(c.at("metrics"));
      cell.threshold = cell.metrics.threshold;
      cell.error = c.at("error").get<std::string>();
      cells.push_back(cell);
    }
    result.rows.push_back(summarize_cells(v, std::move(cells), result.k));
  }
  return result;
}

void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& config, const std::string& command) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["seeds"] = config.seeds;
  j["config"] = config.to_ini();
  write_text(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace graphguard
