#include "cutquad/baseline.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "cutquad/version.hpp"
#include "json_util.hpp"

namespace cutquad {

using nlohmann::ordered_json;

namespace {

using Key = std::tuple<std::string, std::string, Operation, int>;

Key key_of(const Measurement& m) {
  return {m.testcase_id, m.integrator_name, m.operation, m.mesh_divisions};
}

Key key_of(const BaselineEntry& e) {
  return {e.testcase_id, e.integrator_name, e.operation, e.mesh_divisions};
}

Status status_from_string(const std::string& s) {
  if (s == "ok") return Status::Ok;
  if (s == "unsupported") return Status::Unsupported;
  if (s == "failed") return Status::Failed;
  throw std::invalid_argument("unknown status '" + s + "'");
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

BaselineFile record_baseline(const std::vector<Measurement>& measurements,
                             const TolerancePolicy& policy, std::optional<std::string> timestamp) {
  if (!(policy.absolute > 0.0) || !(policy.multiplicative > 0.0)) {
    throw std::invalid_argument("baseline tolerances must be positive");
  }
  BaselineFile b;
  b.tolerance = policy;
  b.generated_at = timestamp ? *timestamp : utc_timestamp();
  b.revision = code_revision();
  std::set<Key> seen;
  for (const auto& m : measurements) {
    if (!seen.insert(key_of(m)).second) {
      throw std::invalid_argument(fmt::format("duplicate measurement {}/{}/{}/{}", m.testcase_id,
                                              m.integrator_name, to_string(m.operation),
                                              m.mesh_divisions));
    }
    b.entries.push_back({m.testcase_id, m.integrator_name, m.operation, m.mesh_divisions, m.status,
                         m.rel_error});
  }
  return b;
}

std::string baseline_to_json_text(const BaselineFile& b) {
  ordered_json j;
  j["_warning"] = "machine-generated by `cutquad baseline`; regenerate rather than hand-edit";
  j["schema_version"] = b.schema_version;
  j["generated_at"] = b.generated_at;
  j["revision"] = b.revision;
  j["tolerance"] = {{"absolute", b.tolerance.absolute}, {"multiplicative", b.tolerance.multiplicative}};
  ordered_json entries = ordered_json::array();
  for (const auto& e : b.entries) {
    ordered_json je;
    je["testcase"] = e.testcase_id;
    je["integrator"] = e.integrator_name;
    je["operation"] = to_string(e.operation);
    je["divisions"] = e.mesh_divisions;
    je["status"] = to_string(e.status);
    je["rel_error"] = e.rel_error ? ordered_json(*e.rel_error) : ordered_json(nullptr);
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

BaselineFile baseline_from_json_text(const std::string& text) {
  const auto j = detail::parse_json_with_lines(text);
  BaselineFile b;
  try {
    if (!j.is_object()) throw std::invalid_argument("baseline must be a JSON object");
    b.schema_version = j.at("schema_version").get<int>();
    if (b.schema_version != BaselineFile::kSchemaVersion) {
      throw std::invalid_argument(fmt::format("unsupported baseline schema version {} (expected {})",
                                              b.schema_version, BaselineFile::kSchemaVersion));
    }
    b.generated_at = j.value("generated_at", std::string());
    b.revision = j.value("revision", std::string());
    const auto& tol = j.at("tolerance");
    b.tolerance.absolute = tol.at("absolute").get<double>();
    b.tolerance.multiplicative = tol.at("multiplicative").get<double>();
    if (!(b.tolerance.absolute > 0.0) || !(b.tolerance.multiplicative > 0.0)) {
      throw std::invalid_argument("baseline tolerances must be positive");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("baseline header: {}", e.what()));
  }

  std::set<Key> seen;
  if (!j.contains("entries")) throw std::invalid_argument("baseline has no 'entries' array");
  const auto& entries = j.at("entries");
  if (!entries.is_array()) throw std::invalid_argument("baseline 'entries' must be an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    try {
      const auto& je = entries[i];
      BaselineEntry e;
      e.testcase_id = je.at("testcase").get<std::string>();
      e.integrator_name = je.at("integrator").get<std::string>();
      e.operation = operation_from_string(je.at("operation").get<std::string>());
      e.mesh_divisions = je.at("divisions").get<int>();
      e.status = status_from_string(je.at("status").get<std::string>());
      if (je.contains("rel_error") && !je.at("rel_error").is_null()) {
        e.rel_error = je.at("rel_error").get<double>();
      }
      if (!seen.insert(key_of(e)).second) throw std::invalid_argument("duplicate key");
      b.entries.push_back(std::move(e));
    } catch (const std::exception& ex) {
      throw std::invalid_argument(fmt::format("baseline entries[{}]: {}", i, ex.what()));
    }
  }
  return b;
}

BaselineFile load_baseline(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open baseline " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return baseline_from_json_text(ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void save_baseline(const BaselineFile& baseline, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << baseline_to_json_text(baseline);
}

std::size_t ComparisonReport::failures() const {
  std::size_t n = 0;
  for (const auto& v : verdicts) n += v.pass ? 0 : 1;
  return n;
}

ComparisonReport compare_to_baseline(const std::vector<Measurement>& measurements,
                                     const BaselineFile& baseline) {
  if (baseline.schema_version != BaselineFile::kSchemaVersion) {
    throw std::invalid_argument("unsupported baseline schema version");
  }
  std::map<Key, const Measurement*> by_key;
  for (const auto& m : measurements) by_key.emplace(key_of(m), &m);

  ComparisonReport report;
  std::set<Key> used;
  const auto& tol = baseline.tolerance;
  for (const auto& e : baseline.entries) {
    EntryVerdict v;
    v.expected = e;
    auto it = by_key.find(key_of(e));
    if (it == by_key.end()) {
      v.reason = "missing measurement";
      report.verdicts.push_back(std::move(v));
      continue;
    }
    used.insert(it->first);
    const Measurement& m = *it->second;
    v.measured = m;
    if (m.status == Status::Failed && e.status != Status::Failed) {
      v.reason = "integrator failed: " + m.message;
    } else if (m.status != e.status) {
      v.reason = fmt::format("status changed: expected {}, got {}", to_string(e.status), to_string(m.status));
    } else if (e.rel_error && !m.rel_error) {
      v.reason = "relative error no longer available";
    } else if (e.rel_error) {
      const double limit = *e.rel_error * (1.0 + tol.multiplicative) + tol.absolute;
      v.pass = *m.rel_error <= limit;
      v.reason = v.pass ? "within tolerance"
                        : fmt::format("rel_error {:.6g} > limit {:.6g}", *m.rel_error, limit);
    } else {
      v.pass = true;
      v.reason = "status matches";
    }
    report.verdicts.push_back(std::move(v));
  }
  for (const auto& m : measurements) {
    if (!used.contains(key_of(m))) report.extras.push_back(m);
    if (m.status == Status::Failed) report.execution_errors.push_back(m);
  }
  return report;
}

}  // namespace cutquad
