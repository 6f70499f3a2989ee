#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

#include "cutquad/ci_config.hpp"

using namespace cutquad;

namespace {

BenchmarkSuite three_integrators() {
  BenchmarkSuite s;
  s.testcases = builtin_catalog();
  for (const char* n : {"quadtree", "linear", "flux"}) s.integrators.push_back(builtin_registry().create(n));
  s.operations = {Operation::Area2D, Operation::InterfaceCurveLength};
  s.mesh_plan = {2, 4, 8};
  return s;
}

std::vector<std::string> strings(const YAML::Node& n) {
  std::vector<std::string> out;
  for (const auto& x : n) out.push_back(x.as<std::string>());
  return out;
}

}  // namespace

TEST_CASE("pipeline jobs for three integrators") {
  const auto spec = generate_pipeline(three_integrators(), {{"flux", "windows-runner"}});
  std::vector<std::string> names;
  for (const auto& j : spec.jobs) names.push_back(j.name);
  CHECK(names == std::vector<std::string>{"build", "quick-quadtree", "quick-linear", "quick-flux",
                                          "extensive-quadtree", "extensive-linear", "extensive-flux", "report"});
  CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());
  std::size_t non_build = 0;
  for (const auto& j : spec.jobs) non_build += j.stage != "build";
  CHECK(non_build == 7);
}

TEST_CASE("pipeline yaml parses and carries retention and tags") {
  const auto spec = generate_pipeline(three_integrators(), {{"flux", "windows-runner"}}, {});
  const auto text = pipeline_yaml_text(spec);
  const YAML::Node doc = YAML::Load(text);
  CHECK(strings(doc["stages"]) == std::vector<std::string>{"build", "quick", "extensive", "report"});
  for (const auto& j : spec.jobs) {
    const auto node = doc[j.name];
    REQUIRE(node.IsMap());
    CHECK(node["stage"].as<std::string>() == j.stage);
    CHECK(node["artifacts"]["expire_in"].as<std::string>() == "2 days");
    CHECK(strings(node["script"]) == j.script);
    CHECK(strings(node["artifacts"]["paths"]) == j.artifact_paths);
  }
  CHECK(strings(doc["quick-flux"]["tags"]) == std::vector<std::string>{"windows-runner"});
  CHECK(strings(doc["extensive-flux"]["tags"]) == std::vector<std::string>{"windows-runner"});
  CHECK_FALSE(doc["quick-linear"]["tags"]);
  CHECK(text.find("- windows-runner\n") != std::string::npos);
  CHECK(text.find("expire_in: 2 days\n") != std::string::npos);
  CHECK(strings(doc["extensive-linear"]["needs"]) == std::vector<std::string>{"build", "quick-linear"});
}

TEST_CASE("awkward scalars survive the emitter") {
  PipelineOptions opts;
  opts.default_tag = "yes";
  opts.artifacts_dir = "out: #x";
  const auto spec = generate_pipeline(three_integrators(), {{"linear", "true"}, {"quadtree", "8"}}, opts);
  const YAML::Node doc = YAML::Load(pipeline_yaml_text(spec));
  CHECK(doc["build"]["tags"][0].as<std::string>() == "yes");
  CHECK(doc["quick-linear"]["tags"][0].as<std::string>() == "true");
  CHECK(doc["quick-quadtree"]["tags"][0].as<std::string>() == "8");
  CHECK(doc["report"]["artifacts"]["paths"][0].as<std::string>() == "out: #x/report/");
  CHECK(doc["quick-flux"]["script"][0].as<std::string>() == spec.jobs[3].script[0]);
}

TEST_CASE("pipeline errors") {
  CHECK_THROWS_AS(generate_pipeline(three_integrators(), {{"momentfit", "gpu"}}), std::invalid_argument);
  CHECK_THROWS_AS(generate_pipeline(three_integrators(), {{"flux", ""}}), std::invalid_argument);
  CHECK_THROWS_AS(generate_pipeline(BenchmarkSuite{}, {}), std::invalid_argument);

  auto spec = generate_pipeline(three_integrators(), {});
  CHECK_NOTHROW(spec.validate());
  auto dup = spec;
  dup.jobs.push_back(dup.jobs[1]);
  CHECK_THROWS_AS(dup.validate(), std::invalid_argument);
  auto backwards = spec;
  backwards.jobs[1].needs = {"report"};
  CHECK_THROWS_AS(backwards.validate(), std::invalid_argument);
  auto stage = spec;
  stage.jobs[0].stage = "deploy";
  CHECK_THROWS_AS(stage.validate(), std::invalid_argument);
  auto keep = spec;
  keep.retention.clear();
  CHECK_THROWS_AS(keep.validate(), std::invalid_argument);
}

TEST_CASE("tier filter") {
  const auto s = three_integrators();
  const auto quick = tier_filter(s, TierSelection::Quick);
  REQUIRE(quick.suite.testcases.size() == 1);
  CHECK(quick.suite.testcases[0].id == "circle");
  CHECK(quick.suite.mesh_plan == std::vector<int>{2});
  CHECK_FALSE(quick.suite.shift_studies);
  CHECK_FALSE(quick.warning);

  const auto ext = tier_filter(s, TierSelection::Extensive);
  CHECK(ext.suite.testcases.size() == s.testcases.size());
  CHECK(ext.suite.mesh_plan == s.mesh_plan);
  CHECK(ext.suite.shift_studies);

  const auto all = tier_filter(s, TierSelection::All);
  CHECK(all.suite.testcases.size() == s.testcases.size());

  auto only_ext = s;
  only_ext.testcases.erase(only_ext.testcases.begin());
  const auto none = tier_filter(only_ext, TierSelection::Quick);
  CHECK(none.suite.testcases.empty());
  CHECK(none.warning.has_value());
}

TEST_CASE("gate exit code is monotone in severity") {
  Measurement ok;
  ok.testcase_id = "circle";
  ok.integrator_name = "linear";
  ok.status = Status::Ok;
  ok.reference = 1.0;
  ok.value = 1.001;
  ok.rel_error = 1e-3;
  const auto base = record_baseline({ok});

  CHECK(gate_exit_code(compare_to_baseline({ok}, base)) == kExitPass);
  auto worse = ok;
  worse.rel_error = 1.0;
  CHECK(gate_exit_code(compare_to_baseline({worse}, base)) == kExitToleranceFailure);
  auto failed = ok;
  failed.status = Status::Failed;
  failed.rel_error.reset();
  CHECK(gate_exit_code(compare_to_baseline({failed}, base)) == kExitError);
  auto extra = failed;
  extra.mesh_divisions = 64;
  CHECK(gate_exit_code(compare_to_baseline({worse, extra}, base)) == kExitError);

  CHECK(gate_exit_code(std::vector<Measurement>{ok}) == kExitPass);
  CHECK(gate_exit_code(std::vector<Measurement>{ok, failed}) == kExitError);
  CHECK(kExitPass < kExitToleranceFailure);
  CHECK(kExitToleranceFailure < kExitError);
}
