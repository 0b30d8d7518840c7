// graphguard command-line tool.
//
//   graphguard generate --seed 7 --out data.csv
//   graphguard --config configs/desk.ini train --split 0 --seed 0
//   graphguard --config configs/desk.ini score --checkpoint runs/model.ggckpt
//   graphguard --config configs/desk.ini grid
//   graphguard report --results runs/results.json
//
// Every config key is also a flag: --train.epochs 100, --graph.relations card_id.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "graphguard/checkpoint.hpp"
#include "graphguard/config.hpp"
#include "graphguard/error.hpp"
#include "graphguard/runner.hpp"

namespace gg = graphguard;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_path;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> override_order;
  bool quiet = false;
  bool verbose = false;
};

gg::ExperimentConfig resolve_config(const Common& common) {
  gg::ExperimentConfig config =
      common.config_path.empty() ? gg::ExperimentConfig{} : gg::ExperimentConfig::load(common.config_path);
  for (const auto& name : common.override_order) {
    const auto dot = name.find('.');
    config.set(name.substr(0, dot), name.substr(dot + 1), common.overrides.at(name));
  }
  config.validate();
  return config;
}

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

std::string fmt_optional(const std::optional<double>& v) {
  if (!v) return "absent";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

void print_metrics(const gg::DayMetrics& m, int k) {
  std::cout << "day " << m.day << ": n=" << m.n << " frauds=" << m.frauds << " PR-AUC=" << fmt_optional(m.pr_auc)
            << " F1=" << fmt_optional(m.f1) << " NPr@" << k << "=" << fmt_optional(m.npr) << '\n';
}

void write_metrics_json(const fs::path& path, const gg::SplitResult& r, int k) {
  gg::CellSummary cell;
  cell.split_index = r.split_index;
  cell.test_day = r.test_day.day;
  cell.seed = r.seed;
  cell.threshold = r.threshold;
  cell.metrics = r.test_metrics;
  gg::GridResult g;
  g.k = k;
  g.rows.push_back(gg::summarize_cells(r.variant, {cell}, k));
  std::ofstream(path) << gg::results_json(g);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gg::Error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void print_breakdown(const gg::GridResult& result) {
  auto stat = [](const gg::Stat& s) {
    if (s.count == 0) return std::string("n/a");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f ± %.2f (n=%d)", 100 * s.mean, 100 * s.std, s.count);
    return std::string(buf);
  };
  for (const auto& row : result.rows) {
    std::cout << row.variant.relation_set << " " << row.variant.method() << '\n'
              << "  across days:  PR-AUC " << stat(row.pr_auc_across_days) << "  F1 " << stat(row.f1_across_days)
              << "  NPr@" << result.k << " " << stat(row.npr_across_days) << '\n'
              << "  across seeds: PR-AUC " << stat(row.pr_auc_across_seeds) << "  F1 " << stat(row.f1_across_seeds)
              << "  NPr@" << result.k << " " << stat(row.npr_across_seeds) << '\n';
    for (const auto& c : row.cells)
      if (!c.error.empty())
        std::cout << "  split " << c.split_index << " seed " << c.seed << " failed: " << c.error << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-supervised contrastive graph scoring of card transactions"};
  app.set_version_flag("--version", std::string(gg::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("-c,--config", common.config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_flag("-q,--quiet", common.quiet, "Only print errors");
  app.add_flag("-v,--verbose", common.verbose, "Print progress");
  for (const auto& key : gg::ExperimentConfig::keys()) {
    app.add_option_function<std::string>(
           "--" + key,
           [&common, key](const std::string& v) {
             if (!common.overrides.count(key)) common.override_order.push_back(key);
             common.overrides[key] = v;
           },
           "Override config key " + key)
        ->group("Config overrides");
  }

  std::string out;
  int split = 0;
  std::optional<std::uint64_t> seed;
  std::string checkpoint;
  std::string results;
  std::string edges;

  auto* gen = app.add_subcommand("generate", "Write a synthetic transaction table");
  gen->add_option("--out", out, "Output CSV (default <output dir>/data.csv)");
  gen->add_option("--seed", seed, "Generator seed");

  auto* tr = app.add_subcommand("train", "Train one split and save a checkpoint");
  auto* sc = app.add_subcommand("score", "Score a split with a saved checkpoint");
  for (auto* sub : {tr, sc}) {
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--split", split, "Split index")->capture_default_str();
    sub->add_option("--seed", seed, "Model seed (default: first of train.seeds)");
    sub->add_option("--checkpoint", checkpoint, "Checkpoint path (default <out>/model.ggckpt)");
    sub->add_option("--edges", edges, "Also dump the test-day graph edges to this file");
  }

  auto* ev = app.add_subcommand("evaluate", "Run the configured variant over all splits and seeds");
  auto* gr = app.add_subcommand("grid", "Run all 8 ablation variants over all splits and seeds");
  for (auto* sub : {ev, gr}) sub->add_option("--out", out, "Output directory");

  auto* rp = app.add_subcommand("report", "Render a stored results.json");
  rp->add_option("--results", results, "results.json (default <output dir>/results.json)");
  bool breakdown = false;
  rp->add_flag("--breakdown", breakdown, "Also print across-day and across-seed spreads");

  CLI11_PARSE(app, argc, argv);

  gg::set_log_level(common.quiet ? gg::LogLevel::kQuiet : common.verbose ? gg::LogLevel::kInfo : gg::LogLevel::kWarn);
  try {
    gg::ExperimentConfig config = resolve_config(common);
    const fs::path out_dir = out.empty() ? config.output_path() : fs::path(out);
    const std::string cmd = command_line(argc, argv);

    if (gen->parsed()) {
      if (seed) config.generator.seed = *seed;
      const fs::path path = out.empty() ? config.output_path() / "data.csv" : fs::path(out);
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      gg::write_table(gg::generate(config.generator), path, gg::generator_schema());
      std::cout << "wrote " << path.string() << '\n';
      return 0;
    }

    if (rp->parsed()) {
      const fs::path path = results.empty() ? config.output_path() / "results.json" : fs::path(results);
      const gg::GridResult result = gg::parse_results_json(read_file(path));
      std::cout << gg::render_table(result);
      if (breakdown) print_breakdown(result);
      return 0;
    }

    const gg::TransactionTable table = gg::load_dataset(config);
    fs::create_directories(out_dir);
    gg::write_manifest(out_dir, config, cmd);

    if (tr->parsed() || sc->parsed()) {
      const std::uint64_t s = seed ? *seed : config.seeds.front();
      const gg::SplitPlan plan =
          gg::make_splits(table.n_days(), config.eval.eta, config.eval.n_val, config.eval.n_test_days);
      if (split < 0 || static_cast<std::size_t>(split) >= plan.splits.size())
        throw gg::Error("--split " + std::to_string(split) + " out of range (" + std::to_string(plan.splits.size()) +
                        " splits)");
      const gg::Variant variant = gg::configured_variant(config);
      const gg::PreparedSplit prepared = gg::prepare_split(table, config, plan.splits[split], variant);
      prepared.encoders.save(out_dir / "encoders.txt");
      if (!edges.empty()) prepared.test_graph.write_edges(fs::path(edges));
      const fs::path ckpt = checkpoint.empty() ? out_dir / "model.ggckpt" : fs::path(checkpoint);

      gg::SplitResult r;
      if (tr->parsed()) {
        r = gg::run_split(prepared, config, variant, split, s);
        gg::save_checkpoint(r.params, ckpt);
        gg::write_loss(out_dir / "loss.csv", r.loss);
        std::cout << "saved " << ckpt.string() << " (final loss " << (r.loss.empty() ? 0.0 : r.loss.back()) << ")\n";
      } else {
        const auto& g = prepared.test_graph;
        const gg::TrainConfig tc = gg::train_config_for(config, variant, s);
        const gg::CheckpointShape shape{gg::gnn_kind_for(gg::sampler_for(config, variant)), g.num_features(),
                                        g.num_relations(), static_cast<std::size_t>(tc.embedding_dim)};
        r = gg::score_split(prepared, config, variant, split, s, gg::load_checkpoint(ckpt, shape));
      }
      std::vector<gg::ScoredDay> days = r.val_days;
      days.push_back(r.test_day);
      gg::write_scores(out_dir / "scores.csv", days);
      write_metrics_json(out_dir / "metrics.json", r, config.eval.k);
      for (const auto& note : r.notes) gg::info(note);
      print_metrics(r.test_metrics, config.eval.k);
      return 0;
    }

    gg::RunOptions options{out_dir};
    const gg::GridResult result = ev->parsed()
                                      ? gg::run_variants(table, config, {gg::configured_variant(config)}, options)
                                      : gg::run_grid(table, config, options);
    std::cout << gg::render_table(result);
    std::cout << "results in " << out_dir.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
