#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "graphguard/checkpoint.hpp"
#include "graphguard/config.hpp"
#include "graphguard/error.hpp"
#include "graphguard/runner.hpp"

namespace py = pybind11;
namespace gg = graphguard;

namespace {

std::vector<gg::ScoredTx> to_items(const std::vector<std::int64_t>& tx_ids, const std::vector<double>& scores,
                                   const std::vector<int>& labels) {
  if (tx_ids.size() != scores.size() || scores.size() != labels.size())
    throw gg::Error("tx_ids, scores and labels must have equal lengths");
  std::vector<gg::ScoredTx> items;
  for (std::size_t i = 0; i < scores.size(); ++i) items.push_back({tx_ids[i], scores[i], labels[i]});
  return items;
}

std::vector<std::int64_t> default_ids(std::size_t n) {
  std::vector<std::int64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::int64_t>(i);
  return ids;
}

py::dict metrics_dict(const gg::DayMetrics& m) {
  py::dict d;
  d["day"] = m.day;
  d["n"] = m.n;
  d["frauds"] = m.frauds;
  d["threshold"] = m.threshold;
  d["pr_auc"] = m.pr_auc;
  d["f1"] = m.f1;
  d["npr"] = m.npr;
  return d;
}

py::list scores_list(const std::vector<gg::ScoredDay>& days) {
  py::list out;
  for (const auto& day : days)
    for (const auto& it : day.items) out.append(py::make_tuple(it.tx_id, day.day, it.score, it.label));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Contrastive graph scoring of card transactions";
  m.attr("__version__") = gg::kVersion;

  // Translators run newest first, so the base class goes first.
  py::register_exception<gg::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<gg::SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<gg::UndefinedMetric>(m, "UndefinedMetric", PyExc_ValueError);

  py::class_<gg::ExperimentConfig>(m, "Config")
      .def(py::init<>())
      .def_static("load", &gg::ExperimentConfig::load, py::arg("path"))
      .def("set", &gg::ExperimentConfig::set, py::arg("section"), py::arg("key"), py::arg("value"))
      .def("get", &gg::ExperimentConfig::get, py::arg("section"), py::arg("key"))
      .def_static("keys", &gg::ExperimentConfig::keys)
      .def("to_ini", &gg::ExperimentConfig::to_ini)
      .def("validate", &gg::ExperimentConfig::validate);

  py::class_<gg::TransactionTable>(m, "Table")
      .def("__len__", &gg::TransactionTable::size)
      .def_property_readonly("n_days", &gg::TransactionTable::n_days)
      .def_property_readonly("origin", &gg::TransactionTable::origin)
      .def("labels", [](const gg::TransactionTable& t) {
        std::vector<int> out;
        for (const auto& r : t.rows()) out.push_back(r.label);
        return out;
      })
      .def("days", [](const gg::TransactionTable& t) {
        std::vector<int> out;
        for (const auto& r : t.rows()) out.push_back(r.day);
        return out;
      });

  m.def("load_dataset", &gg::load_dataset, py::arg("config"), "Ingest [data] path, or synthesize from [generator].");
  m.def(
      "write_dataset",
      [](const gg::TransactionTable& table, const std::filesystem::path& path, const gg::ExperimentConfig& config) {
        gg::write_table(table, path, config.data.path.empty() ? gg::generator_schema() : config.data.schema);
      },
      py::arg("table"), py::arg("path"), py::arg("config"));

  m.def(
      "graph_edges",
      [](const gg::TransactionTable& table, int day, const std::vector<std::string>& relations, int theta,
         const std::vector<std::string>& features) {
        gg::GraphConfig gc{relations, features, theta};
        const auto g = gg::TransactionGraph::build(table.batch_of_day(day), table.window_before(day, theta), gc);
        py::list out;
        for (gg::NodeId v = 0; v < static_cast<gg::NodeId>(g.num_nodes()); ++v)
          for (std::size_t r = 0; r < g.num_relations(); ++r) {
            const auto nb = g.out_neighbors(v, r);
            const auto w = g.out_weights(v, r);
            for (std::size_t i = 0; i < nb.size(); ++i)
              out.append(py::make_tuple(g.tx_id(v), g.tx_id(nb[i]), g.relation_names()[r], w[i]));
          }
        return out;
      },
      py::arg("table"), py::arg("day"), py::arg("relations") = std::vector<std::string>{"card_id"},
      py::arg("theta") = 7, py::arg("features") = std::vector<std::string>{"amount"},
      "Edges (src_tx, dst_tx, relation, weight) of the graph for one day.");

  m.def(
      "run_split",
      [](const gg::TransactionTable& table, const gg::ExperimentConfig& config, int split, std::uint64_t seed,
         const std::string& checkpoint) {
        auto r = gg::run_split(table, config, split, seed);
        if (!checkpoint.empty()) gg::save_checkpoint(r.params, checkpoint);
        std::vector<gg::ScoredDay> days = r.val_days;
        days.push_back(r.test_day);
        py::dict d;
        d["loss"] = r.loss;
        d["threshold"] = r.threshold;
        d["metrics"] = metrics_dict(r.test_metrics);
        d["scores"] = scores_list(days);
        d["notes"] = r.notes;
        return d;
      },
      py::arg("table"), py::arg("config"), py::arg("split") = 0, py::arg("seed") = 0,
      py::arg("checkpoint") = std::string(),
      "Train and score one split of the configured variant.");

  m.def(
      "run_grid",
      [](const gg::TransactionTable& table, const gg::ExperimentConfig& config, const std::string& output_dir) {
        return gg::results_json(gg::run_grid(table, config, gg::RunOptions{output_dir}));
      },
      py::arg("table"), py::arg("config"), py::arg("output_dir") = std::string(),
      "Run all 8 ablation variants; returns the results JSON text.");

  m.def(
      "render_table", [](const std::string& results) { return gg::render_table(gg::parse_results_json(results)); },
      py::arg("results_json"));

  m.def(
      "pr_auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        return gg::pr_auc(to_items(default_ids(scores.size()), scores, labels));
      },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "f1_at",
      [](const std::vector<double>& scores, const std::vector<int>& labels, double threshold) {
        return gg::f1_at(to_items(default_ids(scores.size()), scores, labels), threshold);
      },
      py::arg("scores"), py::arg("labels"), py::arg("threshold"));
  m.def(
      "select_threshold",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        return gg::select_threshold(to_items(default_ids(scores.size()), scores, labels));
      },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "npr_at_k",
      [](const std::vector<double>& scores, const std::vector<int>& labels, int k) {
        return gg::npr_at_k(to_items(default_ids(scores.size()), scores, labels), k);
      },
      py::arg("scores"), py::arg("labels"), py::arg("k"), "None when the day has no fraud.");
  m.def(
      "anomaly_score",
      [](const std::vector<double>& negative, const std::vector<double>& positive) {
        return gg::anomaly_score(negative, positive);
      },
      py::arg("negative_scores"), py::arg("positive_scores"));
}
