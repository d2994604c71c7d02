#pragma once

// Machine-readable run reports. A report is a list of named checks, each with a
// descriptive anchor stating the identity being checked, the worst defect seen,
// the tolerance it was held to and a verdict. Everything except the "timings"
// block is a deterministic function of the command, seed, mode and inputs.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetsol/scalar.hpp"

namespace hetsol {

inline constexpr const char* kReportSchema = "hetsol-report/1";

// HETSOL_MODE, when set, replaces the configured mode.
Mode mode_with_env_override(Mode configured);

struct SuiteConfig {
  std::uint64_t seed = 7;
  int trials = 200;
  Mode mode = Mode::Exact;
  double tolerance = 1e-9;  // relative tolerance for float-mode comparisons
  std::string chart_path;
  std::string catalogue_path;

  void check() const;
  // Fields present in the object override the current values.
  void merge_json(const nlohmann::json& j, const std::string& path);
};

// Independent per-trial seed: splitmix64 of (seed, stream, trial).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

// Exact rationals as JSON: integers become numbers, everything else "p/q" strings.
nlohmann::json rational_json(const Rational& q);

struct CheckRecord {
  std::string name;
  std::string anchor;
  double defect = 0;     // worst over all trials folded into this record
  double tolerance = 0;  // 0 means the defect must vanish exactly
  bool pass = true;
  int samples = 0;
  std::string detail;  // first failing sample, if any
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

class Report {
 public:
  Report(std::string command, const SuiteConfig& cfg);

  // Folds one sample into the record `name`; the record fails when any sample's
  // defect exceeds the tolerance (or is NaN).
  void check(const std::string& name, const std::string& anchor, double defect, double tolerance,
             const std::string& detail = "");
  // A check whose verdict is not a defect comparison.
  void verdict(const std::string& name, const std::string& anchor, bool pass, const std::string& detail = "");

  void set_result(const std::string& key, nlohmann::json value) { results_[key] = std::move(value); }
  void add_table(Table t) { tables_.push_back(std::move(t)); }
  void set_timing(const std::string& phase, double seconds) { timings_[phase] = seconds; }

  bool passed() const;
  std::optional<CheckRecord> first_failure() const;
  const std::map<std::string, CheckRecord>& records() const { return records_; }
  const std::map<std::string, double>& timings() const { return timings_; }
  const std::vector<Table>& tables() const { return tables_; }
  const std::string& command() const { return command_; }

  nlohmann::json to_json(bool with_timings = true) const;
  std::string records_csv() const;
  static std::string table_csv(const Table& t);

 private:
  std::string command_;
  SuiteConfig cfg_;
  std::map<std::string, CheckRecord> records_;  // ordered by name
  std::map<std::string, nlohmann::json> results_;
  std::vector<Table> tables_;
  std::map<std::string, double> timings_;
};

nlohmann::json environment_stamp();

// Formats a double with enough digits to round-trip.
std::string format_double(double x);

}  // namespace hetsol
