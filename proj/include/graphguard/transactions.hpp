#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace graphguard {

inline constexpr std::int64_t kSecondsPerDay = 86400;

struct Transaction {
  std::int64_t tx_id = 0;
  std::int64_t time = 0;  // seconds since epoch
  int day = 0;            // day bucket relative to the table origin
  std::string card_id;
  std::string merchant_id;
  std::map<std::string, std::string> categorical;
  std::map<std::string, double> numeric;
  int label = 0;  // 1 = fraud

  // Categorical value by field name; "card_id" and "merchant_id" resolve to
  // the dedicated members. Throws SchemaError on unknown fields.
  const std::string& category(std::string_view field) const;
  double value(std::string_view field) const;
};

// Strict (time, tx_id) order used everywhere a total order on transactions
// is needed.
inline bool earlier(const Transaction& a, const Transaction& b) {
  return a.time != b.time ? a.time < b.time : a.tx_id < b.tx_id;
}

// Immutable, time-ordered transaction set. Rows of one day are contiguous so
// batches and windows are views into the table.
class TransactionTable {
 public:
  TransactionTable() = default;

  // Sorts rows, validates ids and labels, and assigns day buckets of 86,400 s
  // counted from `origin` (default: earliest timestamp).
  explicit TransactionTable(std::vector<Transaction> rows,
                            std::optional<std::int64_t> origin = std::nullopt);

  std::span<const Transaction> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  std::int64_t origin() const { return origin_; }

  // max(day) + 1, or 0 for an empty table.
  int n_days() const { return static_cast<int>(day_offsets_.empty() ? 0 : day_offsets_.size() - 1); }

  // B_t. Out-of-range days give an empty span.
  std::span<const Transaction> batch_of_day(int t) const { return days(t, t); }

  // X_{t|n}: days t-n .. t-1, clipped to the table.
  std::span<const Transaction> window_before(int t, int n) const;

  // Inclusive day range, clipped to the table.
  std::span<const Transaction> days(int first, int last) const;

 private:
  std::vector<Transaction> rows_;
  std::vector<std::size_t> day_offsets_;  // rows of day d: [off[d], off[d+1])
  std::int64_t origin_ = 0;
};

struct TableSchema {
  char delimiter = ',';
  std::string tx_id = "tx_id";  // optional in the file; row number is used when absent
  std::string time = "time";
  std::string card_id = "card_id";
  std::string merchant_id = "merchant_id";
  std::string label = "label";
  std::vector<std::string> categorical;
  std::vector<std::string> numeric;
};

struct DayWindow {
  int t = 0;
  int eta = 1;
  int theta = 1;

  void validate() const;
};

TransactionTable ingest_table(const std::filesystem::path& path, const TableSchema& schema);

void write_table(const TransactionTable& table, const std::filesystem::path& path,
                 const TableSchema& schema);

}  // namespace graphguard
