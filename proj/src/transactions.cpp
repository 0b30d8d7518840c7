#include "graphguard/transactions.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <unordered_set>

#include "csv.hpp"
#include "graphguard/error.hpp"

namespace graphguard {

const std::string& Transaction::category(std::string_view field) const {
  if (field == "card_id") return card_id;
  if (field == "merchant_id") return merchant_id;
  auto it = categorical.find(std::string(field));
  if (it == categorical.end())
    throw SchemaError("transaction " + std::to_string(tx_id) + " has no categorical field '" +
                      std::string(field) + "'");
  return it->second;
}

double Transaction::value(std::string_view field) const {
  auto it = numeric.find(std::string(field));
  if (it == numeric.end())
    throw SchemaError("transaction " + std::to_string(tx_id) + " has no numeric field '" +
                      std::string(field) + "'");
  return it->second;
}

TransactionTable::TransactionTable(std::vector<Transaction> rows, std::optional<std::int64_t> origin)
    : rows_(std::move(rows)) {
  std::sort(rows_.begin(), rows_.end(), earlier);
  std::unordered_set<std::int64_t> ids;
  ids.reserve(rows_.size());
  for (const auto& tx : rows_) {
    if (tx.time < 0) throw Error("transaction " + std::to_string(tx.tx_id) + " has negative time");
    if (tx.label != 0 && tx.label != 1)
      throw Error("transaction " + std::to_string(tx.tx_id) + " has label outside {0,1}");
    if (!ids.insert(tx.tx_id).second) throw Error("duplicate tx_id " + std::to_string(tx.tx_id));
  }
  if (rows_.empty()) {
    origin_ = origin.value_or(0);
    return;
  }
  origin_ = origin.value_or(rows_.front().time);
  if (rows_.front().time < origin_) throw Error("transaction precedes table origin");
  for (auto& tx : rows_) tx.day = static_cast<int>((tx.time - origin_) / kSecondsPerDay);

  const int n_days = rows_.back().day + 1;
  day_offsets_.assign(static_cast<std::size_t>(n_days) + 1, 0);
  std::size_t i = 0;
  for (int d = 0; d < n_days; ++d) {
    day_offsets_[d] = i;
    while (i < rows_.size() && rows_[i].day == d) ++i;
  }
  day_offsets_[n_days] = rows_.size();
}

std::span<const Transaction> TransactionTable::days(int first, int last) const {
  first = std::max(first, 0);
  last = std::min(last, n_days() - 1);
  if (first > last) return {};
  const std::size_t begin = day_offsets_[first];
  const std::size_t end = day_offsets_[last + 1];
  return std::span<const Transaction>(rows_).subspan(begin, end - begin);
}

std::span<const Transaction> TransactionTable::window_before(int t, int n) const {
  if (n < 1) throw Error("window length must be >= 1");
  return days(t - n, t - 1);
}

void DayWindow::validate() const {
  if (eta < 1) throw Error("eta must be >= 1");
  if (theta < 1) throw Error("theta must be >= 1");
}

namespace {

std::size_t require_column(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw SchemaError("missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

template <typename T>
T parse_number(const std::string& text, std::size_t row, const std::string& column) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw Error("row " + std::to_string(row) + ": cannot parse column '" + column + "' value '" +
                text + "'");
  return value;
}

}  // namespace

TransactionTable ingest_table(const std::filesystem::path& path, const TableSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line) || csv::trim_eol(line).empty())
    throw Error(path.string() + ": empty file");
  const std::vector<std::string> header = csv::split(csv::trim_eol(line), schema.delimiter);

  const std::size_t time_col = require_column(header, schema.time);
  const std::size_t card_col = require_column(header, schema.card_id);
  const std::size_t merchant_col = require_column(header, schema.merchant_id);
  const std::size_t label_col = require_column(header, schema.label);
  const auto id_it = std::find(header.begin(), header.end(), schema.tx_id);
  const bool has_id = id_it != header.end();
  const std::size_t id_col = has_id ? static_cast<std::size_t>(id_it - header.begin()) : 0;

  std::vector<std::size_t> cat_cols;
  for (const auto& name : schema.categorical) cat_cols.push_back(require_column(header, name));
  std::vector<std::size_t> num_cols;
  for (const auto& name : schema.numeric) num_cols.push_back(require_column(header, name));

  std::vector<Transaction> rows;
  std::size_t row_number = 0;  // 1-based data row, header excluded
  while (std::getline(in, line)) {
    std::string_view text = csv::trim_eol(line);
    if (text.empty()) continue;
    ++row_number;
    const auto fields = csv::split(text, schema.delimiter);
    if (fields.size() != header.size())
      throw Error("row " + std::to_string(row_number) + ": expected " +
                  std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    Transaction tx;
    tx.tx_id = has_id ? parse_number<std::int64_t>(fields[id_col], row_number, schema.tx_id)
                      : static_cast<std::int64_t>(row_number);
    tx.time = parse_number<std::int64_t>(fields[time_col], row_number, schema.time);
    tx.card_id = fields[card_col];
    tx.merchant_id = fields[merchant_col];
    tx.label = parse_number<int>(fields[label_col], row_number, schema.label);
    if (tx.label != 0 && tx.label != 1)
      throw Error("row " + std::to_string(row_number) + ": label must be 0 or 1");
    if (tx.time < 0) throw Error("row " + std::to_string(row_number) + ": negative time");
    for (std::size_t i = 0; i < cat_cols.size(); ++i)
      tx.categorical[schema.categorical[i]] = fields[cat_cols[i]];
    for (std::size_t i = 0; i < num_cols.size(); ++i)
      tx.numeric[schema.numeric[i]] =
          parse_number<double>(fields[num_cols[i]], row_number, schema.numeric[i]);
    rows.push_back(std::move(tx));
  }
  if (rows.empty()) throw Error(path.string() + ": no data rows");
  return TransactionTable(std::move(rows));
}

void write_table(const TransactionTable& table, const std::filesystem::path& path,
                 const TableSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const char d = schema.delimiter;
  out << schema.tx_id << d << schema.time << d << schema.card_id << d << schema.merchant_id;
  for (const auto& name : schema.categorical) out << d << name;
  for (const auto& name : schema.numeric) out << d << name;
  out << d << schema.label << '\n';
  for (const auto& tx : table.rows()) {
    out << tx.tx_id << d << tx.time << d << csv::quote(tx.card_id, d) << d
        << csv::quote(tx.merchant_id, d);
    for (const auto& name : schema.categorical) out << d << csv::quote(tx.category(name), d);
    for (const auto& name : schema.numeric) out << d << csv::format_double(tx.value(name));
    out << d << tx.label << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace graphguard
