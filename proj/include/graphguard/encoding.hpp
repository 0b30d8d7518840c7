#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "graphguard/transactions.hpp"

namespace graphguard {

// Fraud-ratio encoding of categorical fields. Values unseen at fit time get
// the maximal risk of 1.
class RiskEncoder {
 public:
  static constexpr double kDefaultRisk = 1.0;

  RiskEncoder() = default;
  static RiskEncoder fit(std::span<const Transaction> rows, const std::vector<std::string>& fields);

  double risk(const std::string& field, const std::string& value) const;

  // Writes "<field>_risk" into tx.numeric for every fitted field.
  void apply(Transaction& tx) const;

  const std::vector<std::string>& fields() const { return fields_; }
  const std::map<std::string, std::map<std::string, double>>& table() const { return risks_; }

  static std::string column_name(const std::string& field) { return field + "_risk"; }

 private:
  std::vector<std::string> fields_;
  std::map<std::string, std::map<std::string, double>> risks_;
};

// Z-score normalization fitted on training rows.
class Normalizer {
 public:
  static constexpr double kMinSigma = 1e-12;

  struct Moments {
    double mean = 0;
    double sigma = 1;  // max(sigma, kMinSigma)
    bool constant = false;
  };

  Normalizer() = default;
  // Requires at least 2 rows. Constant columns normalize to 0 with a warning.
  static Normalizer fit(std::span<const Transaction> rows, const std::vector<std::string>& fields);

  double apply(const std::string& field, double x) const;
  void apply(Transaction& tx) const;

  const std::vector<std::string>& fields() const { return fields_; }
  const Moments& moments(const std::string& field) const;

 private:
  std::vector<std::string> fields_;
  std::map<std::string, Moments> moments_;
};

struct Encoders {
  RiskEncoder risk;
  Normalizer normalizer;

  static Encoders fit(std::span<const Transaction> rows, const std::vector<std::string>& risk_fields,
                      const std::vector<std::string>& numeric_fields);

  Transaction encode(const Transaction& tx) const;
  TransactionTable encode(std::span<const Transaction> rows, std::int64_t origin) const;

  // Key-value audit dump: "risk.<field>.<value> = r", "norm.<field>.mean = m", ...
  void save(const std::filesystem::path& path) const;
};

struct SplitTriple {
  std::vector<int> train_days;
  std::vector<int> val_days;
  int test_day = 0;
};

struct SplitPlan {
  std::vector<SplitTriple> splits;
  int eta = 0;
  int n_val = 0;
  int n_test_days = 0;
};

// Rolling windows: split k tests on day n_days - n_test_days + k, validates on
// the n_val days before it and trains on the eta days before those.
SplitPlan make_splits(int n_days, int eta, int n_val, int n_test_days);

}  // namespace graphguard
