#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cutquad/baseline.hpp"
#include "cutquad/harness.hpp"

namespace cutquad {

/// Process exit statuses shared by the CLI and the CI gate.
inline constexpr int kExitPass = 0;
inline constexpr int kExitToleranceFailure = 1;
/// Integrator crash, or a command-line / input error.
inline constexpr int kExitError = 2;

/// 2 if any measurement failed to execute, else 1 if any entry is out of
/// tolerance, else 0.
int gate_exit_code(const ComparisonReport& report);
/// Without a baseline only execution errors count.
int gate_exit_code(const std::vector<Measurement>& measurements);

struct TierFilterResult {
  BenchmarkSuite suite;
  /// Set when the filter left no test cases.
  std::optional<std::string> warning;
};

/// quick: quick-tagged cases on the coarsest mesh, no shift studies.
/// extensive: every case, the full plan, shift studies. all: unchanged.
TierFilterResult tier_filter(const BenchmarkSuite& suite, TierSelection tier);

struct CiJob {
  std::string name;
  std::string stage;
  std::vector<std::string> script;
  std::vector<std::string> tags;
  std::vector<std::string> artifact_paths;
  std::string expire_in;
  std::vector<std::string> needs;
};

struct PipelineSpec {
  std::vector<std::string> stages{"build", "quick", "extensive", "report"};
  std::vector<CiJob> jobs;
  std::string retention = "2 days";

  /// Unique job names, known stages, needs pointing to earlier stages only,
  /// non-empty retention. Throws std::invalid_argument.
  void validate() const;
};

struct PipelineOptions {
  /// Path of the CLI binary as seen from the repository root on the runner.
  std::string executable = "./build/tools/cutquad";
  std::string baseline_path = "ci/baseline.json";
  std::string artifacts_dir = "artifacts";
  std::string retention = "2 days";
  /// Tag for the build and report jobs and integrators missing from the map.
  std::string default_tag;
};

/// One quick and one extensive job per integrator plus build and report.
/// Throws std::invalid_argument for an empty suite or a tag for an
/// integrator the suite does not contain.
PipelineSpec generate_pipeline(const BenchmarkSuite& suite,
                               const std::map<std::string, std::string>& runner_tags,
                               const PipelineOptions& options = {});

/// GitLab-compatible YAML.
std::string pipeline_yaml_text(const PipelineSpec& spec);
void write_pipeline(const PipelineSpec& spec, const std::filesystem::path& path);

}  // namespace cutquad
