#include "cutquad/ci_config.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "cutquad/reporting.hpp"

namespace cutquad {

int gate_exit_code(const ComparisonReport& report) {
  if (!report.execution_errors.empty()) return kExitError;
  if (!report.passed()) return kExitToleranceFailure;
  return kExitPass;
}

int gate_exit_code(const std::vector<Measurement>& measurements) {
  for (const auto& m : measurements) {
    if (m.status == Status::Failed) return kExitError;
  }
  return kExitPass;
}

TierFilterResult tier_filter(const BenchmarkSuite& suite, TierSelection tier) {
  TierFilterResult r;
  r.suite = suite;
  r.suite.tier = tier;
  switch (tier) {
    case TierSelection::All:
      return r;
    case TierSelection::Quick:
      r.suite.testcases.clear();
      for (const auto& tc : suite.testcases) {
        if (tc.tier == Tier::Quick) r.suite.testcases.push_back(tc);
      }
      if (!suite.mesh_plan.empty()) r.suite.mesh_plan = {suite.mesh_plan.front()};
      r.suite.shift_studies = false;
      break;
    case TierSelection::Extensive:
      r.suite.shift_studies = true;
      break;
  }
  if (r.suite.testcases.empty()) {
    r.warning = fmt::format("tier '{}' selects no test cases", to_string(tier));
  }
  return r;
}

void PipelineSpec::validate() const {
  if (retention.empty()) throw std::invalid_argument("pipeline retention must be non-empty");
  std::map<std::string, std::size_t> stage_index;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (!stage_index.emplace(stages[i], i).second) throw std::invalid_argument("duplicate stage " + stages[i]);
  }
  std::map<std::string, std::size_t> job_stage;
  for (const auto& job : jobs) {
    auto it = stage_index.find(job.stage);
    if (it == stage_index.end()) {
      throw std::invalid_argument(fmt::format("job {} references unknown stage {}", job.name, job.stage));
    }
    if (!job_stage.emplace(job.name, it->second).second) {
      throw std::invalid_argument("duplicate job name " + job.name);
    }
    if (job.expire_in.empty() && !job.artifact_paths.empty()) {
      throw std::invalid_argument("job " + job.name + " has artifacts without retention");
    }
  }
  for (const auto& job : jobs) {
    for (const auto& dep : job.needs) {
      auto it = job_stage.find(dep);
      if (it == job_stage.end()) throw std::invalid_argument(fmt::format("job {} needs unknown job {}", job.name, dep));
      if (it->second >= job_stage.at(job.name)) {
        throw std::invalid_argument(fmt::format("job {} needs {} from a later or equal stage", job.name, dep));
      }
    }
  }
}

PipelineSpec generate_pipeline(const BenchmarkSuite& suite, const std::map<std::string, std::string>& runner_tags,
                               const PipelineOptions& options) {
  if (suite.integrators.empty() || suite.testcases.empty() || suite.operations.empty() ||
      suite.mesh_plan.empty()) {
    throw std::invalid_argument("cannot generate a pipeline for an empty suite");
  }
  std::vector<std::string> names;
  for (const auto& integrator : suite.integrators) names.push_back(integrator->name());
  for (const auto& [name, tag] : runner_tags) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw std::invalid_argument("runner tag given for unknown integrator '" + name + "'");
    }
    if (tag.empty()) throw std::invalid_argument("empty runner tag for integrator '" + name + "'");
  }

  std::vector<std::string> testcases, operations, meshes;
  for (const auto& tc : suite.testcases) testcases.push_back(tc.id);
  for (Operation op : suite.operations) operations.push_back(to_string(op));
  for (int d : suite.mesh_plan) meshes.push_back(std::to_string(d));
  const std::string selection =
      fmt::format("--testcase {} --operation {} --mesh {} --order {}", fmt::join(testcases, ","),
                  fmt::join(operations, ","), fmt::join(meshes, ","), suite.order);

  auto tags_for = [&](const std::string& name) -> std::vector<std::string> {
    auto it = runner_tags.find(name);
    if (it != runner_tags.end()) return {it->second};
    if (!options.default_tag.empty()) return {options.default_tag};
    return {};
  };
  const std::vector<std::string> default_tags =
      options.default_tag.empty() ? std::vector<std::string>{} : std::vector<std::string>{options.default_tag};

  PipelineSpec spec;
  spec.retention = options.retention;
  const std::string& exe = options.executable;
  const std::string& art = options.artifacts_dir;

  spec.jobs.push_back({"build",
                       "build",
                       {"cmake -S . -B build -DCMAKE_BUILD_TYPE=Release", "cmake --build build -j"},
                       default_tags,
                       {"build/"},
                       spec.retention,
                       {}});
  for (const auto& name : names) {
    spec.jobs.push_back({"quick-" + name,
                         "quick",
                         {fmt::format("{} run --tier quick --integrator {} {} --baseline {} --output {}/quick/{}", exe,
                                      name, selection, options.baseline_path, art, name)},
                         tags_for(name),
                         {fmt::format("{}/quick/{}/", art, name)},
                         spec.retention,
                         {"build"}});
  }
  std::vector<std::string> extensive_jobs;
  for (const auto& name : names) {
    extensive_jobs.push_back("extensive-" + name);
    spec.jobs.push_back({extensive_jobs.back(),
                         "extensive",
                         {fmt::format("{} run --tier extensive --integrator {} {} --output {}/extensive/{}", exe, name,
                                      selection, art, name)},
                         tags_for(name),
                         {fmt::format("{}/extensive/{}/", art, name)},
                         spec.retention,
                         {"build", "quick-" + name}});
  }
  std::vector<std::string> report_needs{"build"};
  report_needs.insert(report_needs.end(), extensive_jobs.begin(), extensive_jobs.end());
  spec.jobs.push_back(
      {"report",
       "report",
       {fmt::format("{} compare --input {}/extensive --baseline {} --output {}/compare", exe, art,
                    options.baseline_path, art),
        fmt::format("{} report --input {} --baseline {} --output {}/report", exe, art, options.baseline_path, art)},
       default_tags,
       {fmt::format("{}/report/", art), fmt::format("{}/compare/", art)},
       spec.retention,
       report_needs});
  spec.validate();
  return spec;
}

namespace {

bool plain_scalar(const std::string& s) {
  static const std::regex plain(R"([A-Za-z0-9_./][A-Za-z0-9_./:@+=, -]*)");
  static const std::regex number(R"([-+]?(\.[0-9]+|[0-9]+(\.[0-9]*)?)([eE][-+]?[0-9]+)?)");
  static const std::set<std::string> reserved{"true", "false", "yes", "no", "on", "off", "null", "y", "n", "~"};
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (reserved.contains(lower)) return false;
  if (!std::regex_match(s, plain) || std::regex_match(s, number)) return false;
  return s.find(": ") == std::string::npos && s.find(" #") == std::string::npos && s.back() != ':' &&
         s.back() != ' ';
}

std::string scalar(const std::string& s) {
  if (plain_scalar(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

void list(std::string& out, const std::string& indent, const std::string& key,
          const std::vector<std::string>& items) {
  out += indent + key + ":";
  if (items.empty()) {
    out += " []\n";
    return;
  }
  out += "\n";
  for (const auto& item : items) out += indent + "  - " + scalar(item) + "\n";
}

}  // namespace

std::string pipeline_yaml_text(const PipelineSpec& spec) {
  spec.validate();
  std::string out = "# generated by cutquad ci-init\n";
  list(out, "", "stages", spec.stages);
  for (const auto& job : spec.jobs) {
    out += "\n" + scalar(job.name) + ":\n";
    out += "  stage: " + scalar(job.stage) + "\n";
    if (!job.tags.empty()) list(out, "  ", "tags", job.tags);
    if (!job.needs.empty()) list(out, "  ", "needs", job.needs);
    list(out, "  ", "script", job.script);
    if (!job.artifact_paths.empty()) {
      out += "  artifacts:\n";
      out += "    when: always\n";
      list(out, "    ", "paths", job.artifact_paths);
      out += "    expire_in: " + scalar(job.expire_in) + "\n";
    }
  }
  return out;
}

void write_pipeline(const PipelineSpec& spec, const std::filesystem::path& path) {
  write_text_file(path, pipeline_yaml_text(spec));
}

}  // namespace cutquad
