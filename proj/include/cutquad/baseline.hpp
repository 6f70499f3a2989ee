#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cutquad/harness.hpp"

namespace cutquad {

/// An entry passes when rel_error <= expected * (1 + multiplicative) + absolute.
struct TolerancePolicy {
  double absolute = 1e-12;
  double multiplicative = 0.25;
};

struct BaselineEntry {
  std::string testcase_id;
  std::string integrator_name;
  Operation operation = Operation::Area2D;
  int mesh_divisions = 0;
  Status status = Status::Ok;
  std::optional<double> rel_error;

  friend bool operator==(const BaselineEntry&, const BaselineEntry&) = default;
};

struct BaselineFile {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  TolerancePolicy tolerance;
  std::vector<BaselineEntry> entries;
  std::string generated_at;
  std::string revision;
};

/// Stored expectations = measured rel_error and status for every measurement.
BaselineFile record_baseline(const std::vector<Measurement>& measurements,
                             const TolerancePolicy& policy = {},
                             std::optional<std::string> timestamp = std::nullopt);

std::string baseline_to_json_text(const BaselineFile& baseline);

/// Throws std::invalid_argument naming the line (syntax errors) or the entry
/// index (schema errors).
BaselineFile baseline_from_json_text(const std::string& text);
BaselineFile load_baseline(const std::filesystem::path& path);
void save_baseline(const BaselineFile& baseline, const std::filesystem::path& path);

struct EntryVerdict {
  BaselineEntry expected;
  std::optional<Measurement> measured;
  bool pass = false;
  std::string reason;
};

struct ComparisonReport {
  std::vector<EntryVerdict> verdicts;
  /// Measurements without a baseline entry (ignored for the verdict).
  std::vector<Measurement> extras;
  /// Every measurement whose integrator failed, whether or not it is baselined.
  std::vector<Measurement> execution_errors;

  std::size_t failures() const;
  /// Entry-level verdict; execution errors are graded by gate_exit_code.
  bool passed() const { return failures() == 0; }
};

ComparisonReport compare_to_baseline(const std::vector<Measurement>& measurements,
                                     const BaselineFile& baseline);

/// ISO-8601 UTC timestamp of the current time.
std::string utc_timestamp();

}  // namespace cutquad
