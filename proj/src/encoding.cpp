#include "graphguard/encoding.hpp"

#include <cmath>
#include <fstream>

#include "csv.hpp"
#include "graphguard/error.hpp"

namespace graphguard {

RiskEncoder RiskEncoder::fit(std::span<const Transaction> rows, const std::vector<std::string>& fields) {
  if (rows.empty()) throw Error("risk encoder: empty fit set");
  RiskEncoder enc;
  enc.fields_ = fields;
  for (const auto& field : fields) {
    std::map<std::string, std::pair<long, long>> counts;  // value -> (frauds, total)
    for (const auto& tx : rows) {
      auto& [frauds, total] = counts[tx.category(field)];
      frauds += tx.label;
      ++total;
    }
    auto& risks = enc.risks_[field];
    for (const auto& [value, c] : counts)
      risks[value] = static_cast<double>(c.first) / static_cast<double>(c.second);
  }
  return enc;
}

double RiskEncoder::risk(const std::string& field, const std::string& value) const {
  auto f = risks_.find(field);
  if (f == risks_.end()) throw SchemaError("risk encoder has no field '" + field + "'");
  auto v = f->second.find(value);
  return v == f->second.end() ? kDefaultRisk : v->second;
}

void RiskEncoder::apply(Transaction& tx) const {
  for (const auto& field : fields_) tx.numeric[column_name(field)] = risk(field, tx.category(field));
}

Normalizer Normalizer::fit(std::span<const Transaction> rows, const std::vector<std::string>& fields) {
  if (rows.size() < 2) throw Error("normalizer needs at least 2 rows");
  Normalizer norm;
  norm.fields_ = fields;
  const double n = static_cast<double>(rows.size());
  for (const auto& field : fields) {
    double sum = 0;
    for (const auto& tx : rows) sum += tx.value(field);
    const double mean = sum / n;
    double sq = 0;
    for (const auto& tx : rows) {
      const double d = tx.value(field) - mean;
      sq += d * d;
    }
    const double sigma = std::sqrt(sq / n);
    Moments m;
    m.mean = mean;
    m.sigma = std::max(sigma, kMinSigma);
    m.constant = !(sigma > kMinSigma);
    if (m.constant) warn("normalizer: column '" + field + "' is constant; encoded as 0");
    norm.moments_[field] = m;
  }
  return norm;
}

const Normalizer::Moments& Normalizer::moments(const std::string& field) const {
  auto it = moments_.find(field);
  if (it == moments_.end()) throw SchemaError("normalizer has no field '" + field + "'");
  return it->second;
}

double Normalizer::apply(const std::string& field, double x) const {
  const Moments& m = moments(field);
  if (m.constant) return 0.0;
  return (x - m.mean) / m.sigma;
}

void Normalizer::apply(Transaction& tx) const {
  for (const auto& field : fields_) {
    auto it = tx.numeric.find(field);
    if (it == tx.numeric.end()) throw SchemaError("transaction lacks numeric field '" + field + "'");
    it->second = apply(field, it->second);
  }
}

Encoders Encoders::fit(std::span<const Transaction> rows, const std::vector<std::string>& risk_fields,
                       const std::vector<std::string>& numeric_fields) {
  return Encoders{RiskEncoder::fit(rows, risk_fields), Normalizer::fit(rows, numeric_fields)};
}

Transaction Encoders::encode(const Transaction& tx) const {
  Transaction out = tx;
  normalizer.apply(out);
  risk.apply(out);
  return out;
}

TransactionTable Encoders::encode(std::span<const Transaction> rows, std::int64_t origin) const {
  std::vector<Transaction> out;
  out.reserve(rows.size());
  for (const auto& tx : rows) out.push_back(encode(tx));
  return TransactionTable(std::move(out), origin);
}

void Encoders::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& [field, values] : risk.table())
    for (const auto& [value, r] : values)
      out << "risk." << field << '.' << value << " = " << csv::format_double(r) << '\n';
  out << "risk.default = " << csv::format_double(RiskEncoder::kDefaultRisk) << '\n';
  for (const auto& field : normalizer.fields()) {
    const auto& m = normalizer.moments(field);
    out << "norm." << field << ".mean = " << csv::format_double(m.mean) << '\n';
    out << "norm." << field << ".sigma = " << csv::format_double(m.sigma) << '\n';
  }
}

SplitPlan make_splits(int n_days, int eta, int n_val, int n_test_days) {
  if (eta < 1 || n_val < 0 || n_test_days < 1)
    throw Error("make_splits: eta >= 1, n_val >= 0 and n_test_days >= 1 required");
  const int required = eta + n_val + n_test_days;
  if (n_days < required)
    throw Error("make_splits: need at least " + std::to_string(required) + " days (eta + n_val + " +
                "n_test_days), have " + std::to_string(n_days));
  SplitPlan plan;
  plan.eta = eta;
  plan.n_val = n_val;
  plan.n_test_days = n_test_days;
  for (int k = 0; k < n_test_days; ++k) {
    SplitTriple s;
    s.test_day = n_days - n_test_days + k;
    for (int d = s.test_day - n_val; d < s.test_day; ++d) s.val_days.push_back(d);
    for (int d = s.test_day - n_val - eta; d < s.test_day - n_val; ++d) s.train_days.push_back(d);
    plan.splits.push_back(std::move(s));
  }
  return plan;
}

}  // namespace graphguard
