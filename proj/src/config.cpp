#include "graphguard/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include "csv.hpp"
#include "graphguard/error.hpp"

namespace graphguard {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

template <typename T>
void parse_value(const std::string& text, T& out) {
  const std::string t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) throw SchemaError("cannot parse '" + text + "'");
}

void parse_value(const std::string& text, bool& out) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") out = true;
  else if (t == "false" || t == "0" || t == "no" || t == "off") out = false;
  else throw SchemaError("cannot parse boolean '" + text + "'");
}

void parse_value(const std::string& text, std::string& out) { out = trim(text); }

void parse_value(const std::string& text, char& out) {
  const std::string t = text == "\\t" || trim(text) == "\\t" ? "\t" : trim(text);
  if (t.size() != 1) throw SchemaError("delimiter must be a single character, got '" + text + "'");
  out = t[0];
}

void parse_value(const std::string& text, std::vector<std::string>& out) {
  out.clear();
  for (auto& item : csv::split(text, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
}

void parse_value(const std::string& text, std::vector<std::uint64_t>& out) {
  out.clear();
  for (auto& item : csv::split(text, ',')) {
    if (trim(item).empty()) continue;
    std::uint64_t v = 0;
    parse_value(item, v);
    out.push_back(v);
  }
}

template <typename T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, double>) return csv::format_double(v);
  else return std::to_string(v);
}
std::string format_value(const bool& v) { return v ? "true" : "false"; }
std::string format_value(const std::string& v) { return v; }
std::string format_value(const char& v) { return v == '\t' ? "\\t" : std::string(1, v); }
std::string format_value(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}
std::string format_value(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Access>
Field field(std::string section, std::string key, Access access) {
  return Field{std::move(section), std::move(key),
               [access](ExperimentConfig& c, const std::string& text) { parse_value(text, access(c)); },
               [access](const ExperimentConfig& c) {
                 return format_value(access(const_cast<ExperimentConfig&>(c)));
               }};
}

#define GG_FIELD(section, key, expr) field(section, key, [](ExperimentConfig& c) -> auto& { return c.expr; })

const std::vector<Field>& registry() {
  static const std::vector<Field> fields = {
      GG_FIELD("data", "path", data.path),
      GG_FIELD("data", "delimiter", data.schema.delimiter),
      GG_FIELD("data", "tx_id_column", data.schema.tx_id),
      GG_FIELD("data", "time_column", data.schema.time),
      GG_FIELD("data", "card_column", data.schema.card_id),
      GG_FIELD("data", "merchant_column", data.schema.merchant_id),
      GG_FIELD("data", "label_column", data.schema.label),
      GG_FIELD("data", "categorical", data.schema.categorical),
      GG_FIELD("data", "numeric", data.schema.numeric),

      GG_FIELD("generator", "n_cards", generator.n_cards),
      GG_FIELD("generator", "n_merchants", generator.n_merchants),
      GG_FIELD("generator", "n_days", generator.n_days),
      GG_FIELD("generator", "tx_per_card_per_day", generator.tx_per_card_per_day),
      GG_FIELD("generator", "fraud_rate", generator.fraud_rate),
      GG_FIELD("generator", "burst_length", generator.burst_length),
      GG_FIELD("generator", "burst_width_hours", generator.burst_width_hours),
      GG_FIELD("generator", "preferred_merchants", generator.preferred_merchants),
      GG_FIELD("generator", "genuine_log_mean", generator.genuine_log_mean),
      GG_FIELD("generator", "genuine_log_sigma", generator.genuine_log_sigma),
      GG_FIELD("generator", "card_log_spread", generator.card_log_spread),
      GG_FIELD("generator", "fraud_log_mean", generator.fraud_log_mean),
      GG_FIELD("generator", "fraud_log_sigma", generator.fraud_log_sigma),
      GG_FIELD("generator", "start_time", generator.start_time),
      GG_FIELD("generator", "seed", generator.seed),

      GG_FIELD("encoding", "risk_fields", encoding.risk_fields),
      GG_FIELD("encoding", "numeric_fields", encoding.numeric_fields),

      GG_FIELD("graph", "relations", graph.relations),
      GG_FIELD("graph", "features", graph.features),
      GG_FIELD("graph", "theta", graph.theta),

      GG_FIELD("sampler", "subgraph_size", sampler.subgraph_size),
      GG_FIELD("sampler", "restart_prob", sampler.restart_prob),
      GG_FIELD("sampler", "weighted", sampler.weighted),
      GG_FIELD("sampler", "multi_relational", sampler.multi_relational),
      GG_FIELD("sampler", "rounds", sampler.rounds),
      GG_FIELD("sampler", "epsilon", sampler.epsilon),
      GG_FIELD("sampler", "walk_budget_factor", sampler.walk_budget_factor),

      GG_FIELD("train", "epochs", train.epochs),
      GG_FIELD("train", "learning_rate", train.learning_rate),
      GG_FIELD("train", "batch_size", train.batch_size),
      GG_FIELD("train", "embedding_dim", train.embedding_dim),
      GG_FIELD("train", "rgcn_batch_size", rgcn_batch_size),
      GG_FIELD("train", "rgcn_embedding_dim", rgcn_embedding_dim),
      GG_FIELD("train", "seeds", seeds),
      GG_FIELD("train", "beta1", train.beta1),
      GG_FIELD("train", "beta2", train.beta2),
      GG_FIELD("train", "adam_epsilon", train.adam_epsilon),

      GG_FIELD("eval", "eta", eval.eta),
      GG_FIELD("eval", "n_val", eval.n_val),
      GG_FIELD("eval", "n_test_days", eval.n_test_days),
      GG_FIELD("eval", "k", eval.k),

      GG_FIELD("grid", "card_field", grid.card_field),
      GG_FIELD("grid", "merchant_field", grid.merchant_field),
      GG_FIELD("grid", "theta_card", grid.theta_card),
      GG_FIELD("grid", "theta_card_merchant", grid.theta_card_merchant),

      GG_FIELD("output", "dir", output_dir),
  };
  return fields;
}

#undef GG_FIELD

const Field& find_field(const std::string& section, const std::string& key) {
  for (const auto& f : registry())
    if (f.section == section && f.key == key) return f;
  throw SchemaError("unknown config key '" + section + "." + key + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw SchemaError("config " + path.string() + ": " + e.what());
  }
  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw SchemaError("config " + path.string() + ": key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      try {
        config.set(section, key, value.data());
      } catch (const SchemaError& e) {
        throw SchemaError("config " + path.string() + ": " + e.what());
      }
    }
  }
  config.validate();
  return config;
}

void ExperimentConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  const Field& f = find_field(section, key);
  try {
    f.set(*this, value);
  } catch (const SchemaError& e) {
    throw SchemaError(section + "." + key + ": " + e.what());
  }
}

std::string ExperimentConfig::get(const std::string& section, const std::string& key) const {
  return find_field(section, key).get(*this);
}

std::vector<std::string> ExperimentConfig::keys() {
  std::vector<std::string> out;
  for (const auto& f : registry()) out.push_back(f.section + "." + f.key);
  return out;
}

std::string ExperimentConfig::to_ini() const {
  std::ostringstream out;
  std::string section;
  for (const auto& f : registry()) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(*this) << '\n';
  }
  return out.str();
}

void ExperimentConfig::validate() const {
  if (!data.path.empty()) {
    if (data.schema.time.empty() || data.schema.card_id.empty() || data.schema.merchant_id.empty() ||
        data.schema.label.empty())
      throw SchemaError("data: time, card, merchant and label columns must be named");
  } else {
    generator.validate();
  }
  graph.validate();
  sampler.validate();
  train.validate();
  if (seeds.empty()) throw Error("train.seeds must list at least one seed");
  if (rgcn_batch_size < 0 || rgcn_embedding_dim < 0) throw Error("train: R-GCN overrides must be >= 0");
  if (eval.eta < 1 || eval.n_val < 1 || eval.n_test_days < 1 || eval.k < 1)
    throw Error("eval: eta, n_val, n_test_days and k must be >= 1");
  if (grid.theta_card < 1 || grid.theta_card_merchant < 1) throw Error("grid: thetas must be >= 1");
}

std::filesystem::path ExperimentConfig::output_path() const {
  std::filesystem::path p(output_dir);
  if (p.is_relative())
    if (const char* root = std::getenv("GRAPHGUARD_OUTPUT_ROOT"); root && *root) return std::filesystem::path(root) / p;
  return p;
}

TransactionTable load_dataset(const ExperimentConfig& config) {
  if (!config.data.path.empty()) return ingest_table(config.data.path, config.data.schema);
  return generate(config.generator);
}

}  // namespace graphguard
