#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "cutquad/baseline.hpp"
#include "cutquad/harness.hpp"
#include "cutquad/reporting.hpp"

using namespace cutquad;
using doctest::Approx;

namespace {

TestCase by_id(const std::string& id) {
  for (auto& tc : builtin_catalog()) {
    if (tc.id == id) return tc;
  }
  throw std::runtime_error("no test case " + id);
}

class ThrowingIntegrator final : public Integrator {
 public:
  ThrowingIntegrator() {
    desc_.name = "throwing";
    desc_.supported_dims = {2, 3};
    desc_.capabilities = {Operation::Area2D, Operation::Volume3D};
  }
  const IntegratorDescriptor& descriptor() const override { return desc_; }

 protected:
  Estimate evaluate(Operation, const TestCase&, const CartesianMesh&, int) const override {
    throw std::runtime_error("injected failure");
  }

 private:
  IntegratorDescriptor desc_;
};

BenchmarkSuite small_suite() {
  BenchmarkSuite s;
  s.testcases = {by_id("circle")};
  s.integrators = {builtin_registry().create("quadtree"), builtin_registry().create("linear")};
  s.operations = {Operation::Area2D};
  s.mesh_plan = {2, 4, 8};
  s.order = 3;
  return s;
}

Measurement meas(const std::string& tc, const std::string& integ, Operation op, int n, Status st,
                 std::optional<double> err) {
  Measurement m;
  m.testcase_id = tc;
  m.integrator_name = integ;
  m.operation = op;
  m.mesh_divisions = n;
  m.status = st;
  m.rel_error = err;
  if (err) {
    m.reference = 1.0;
    m.value = 1.0 + *err;
  }
  return m;
}

}  // namespace

TEST_CASE("suite cardinality and ordering") {
  const auto s = small_suite();
  const auto ms = run_suite(s);
  REQUIRE(ms.size() == 1 * 2 * 1 * 3);
  const std::vector<std::pair<std::string, int>> order{{"quadtree", 2}, {"quadtree", 4}, {"quadtree", 8},
                                                       {"linear", 2},   {"linear", 4},   {"linear", 8}};
  for (std::size_t i = 0; i < ms.size(); ++i) {
    CHECK(ms[i].testcase_id == "circle");
    CHECK(ms[i].integrator_name == order[i].first);
    CHECK(ms[i].mesh_divisions == order[i].second);
    CHECK(ms[i].status == Status::Ok);
    REQUIRE(ms[i].rel_error.has_value());
    CHECK(*ms[i].rel_error == Approx(std::abs(ms[i].value - *ms[i].reference) / *ms[i].reference));
  }
}

TEST_CASE("full matrix keeps unsupported entries") {
  BenchmarkSuite s;
  s.testcases = builtin_catalog();
  for (const auto& n : builtin_registry().names()) {
    s.integrators.push_back(builtin_registry().create(n, n == "montecarlo" ? ParameterMap{{"samples", "500"}}
                                                                         : ParameterMap{}));
  }
  s.operations.assign(std::begin(kAllOperations), std::end(kAllOperations));
  s.mesh_plan = {2};
  s.order = 2;
  const auto ms = run_suite(s);
  CHECK(ms.size() == s.testcases.size() * s.integrators.size() * 6);
  std::set<std::tuple<std::string, std::string, Operation, int>> keys;
  for (const auto& m : ms) {
    keys.insert({m.testcase_id, m.integrator_name, m.operation, m.mesh_divisions});
    CHECK(m.status != Status::Failed);
    if (m.status == Status::Unsupported) {
      CHECK_FALSE(m.rel_error.has_value());
      CHECK_FALSE(m.message.empty());
    }
  }
  CHECK(keys.size() == ms.size());
}

TEST_CASE("a failing integrator does not affect the others") {
  auto s = small_suite();
  const auto clean = run_suite(s);
  s.integrators.insert(s.integrators.begin() + 1, std::make_shared<ThrowingIntegrator>());
  for (int threads : {1, 3}) {
    s.threads = threads;
    const auto ms = run_suite(s);
    REQUIRE(ms.size() == 9);
    std::vector<Measurement> others;
    for (const auto& m : ms) {
      if (m.integrator_name == "throwing") {
        CHECK(m.status == Status::Failed);
        CHECK(m.message == "injected failure");
      } else {
        others.push_back(m);
      }
    }
    CHECK(others == clean);
  }
}

TEST_CASE("runs are deterministic") {
  auto s = small_suite();
  s.integrators.push_back(builtin_registry().create("montecarlo", {{"samples", "20000"}}));
  const auto a = measurements_csv_text(run_suite(s));
  s.threads = 4;
  const auto b = measurements_csv_text(run_suite(s));
  CHECK(a == b);
}

TEST_CASE("timing mode records runtimes") {
  auto s = small_suite();
  s.mesh_plan = {4};
  s.timing = true;
  for (const auto& m : run_suite(s)) CHECK(m.runtime_s > 0.0);
  s.timing = false;
  for (const auto& m : run_suite(s)) CHECK(m.runtime_s == 0.0);
}

TEST_CASE("suite validation") {
  auto s = small_suite();
  s.mesh_plan = {4, 2};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.mesh_plan = {4, 4};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.mesh_plan = {};
  CHECK_THROWS_AS(run_suite(s), std::invalid_argument);
  s = small_suite();
  s.integrators.clear();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK(tier_selection_from_string("quick") == TierSelection::Quick);
  CHECK(tier_selection_from_string("all") == TierSelection::All);
  CHECK_THROWS(tier_selection_from_string("slow"));
}

TEST_CASE("order estimate recovers synthetic rates") {
  const std::vector<double> h{0.5, 0.25, 0.125, 0.0625, 0.03125};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(0.1, 10.0);
  for (double p : {1.0, 2.0, 3.0}) {
    const double k = c(rng);
    std::vector<double> e;
    for (double x : h) e.push_back(k * std::pow(x, p));
    const auto est = estimate_order(h, e);
    REQUIRE(est.has_value());
    CHECK(std::abs(*est - p) <= 1e-6);
  }
  CHECK_FALSE(estimate_order(h, {1e-16, 1e-17, 0, 0, 1e-15}).has_value());
  // Floor entries are dropped from the fit.
  const auto partial = estimate_order(h, {0.25, 0.0625, 1e-16, 0.0, 1e-15});
  REQUIRE(partial.has_value());
  CHECK(*partial == Approx(2.0));
  CHECK_FALSE(estimate_order({0.5}, {0.1}).has_value());
  CHECK_THROWS_AS(estimate_order({0.5, 0.25}, {0.1}), std::invalid_argument);
}

TEST_CASE("convergence study") {
  const auto tc = by_id("circle");
  const auto lin = builtin_registry().create("linear");
  CHECK_THROWS_AS(convergence_study(tc, lin, Operation::Area2D, {8}), std::invalid_argument);
  const auto t = convergence_study(tc, lin, Operation::Area2D, {8, 16, 32}, 3);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].h == Approx(0.125));
  CHECK(t.rows[2].h == Approx(1.0 / 32));
  REQUIRE(t.order.has_value());
  CHECK(*t.order > 1.5);
  CHECK(*t.order < 2.5);

  const auto flux = builtin_registry().create("flux");
  const auto f = convergence_study(tc, flux, Operation::Area2D, {2, 4}, 3);
  CHECK_FALSE(f.order.has_value());
  CHECK(f.order_text() == "saturated");

  const auto tables = convergence_tables(run_suite(small_suite()), {tc});
  REQUIRE(tables.size() == 2);
  CHECK(tables[0].integrator_name == "quadtree");
  CHECK(tables[1].rows.size() == 3);
}

TEST_CASE("shift study") {
  const auto tc = by_id("circle");
  const auto lin = builtin_registry().create("linear");
  const auto one = shift_study(tc, lin, Operation::Area2D, 8, 1, {0.01, 0, 0}, {0.2, 0, 0}, 3);
  REQUIRE(one.measurements.size() == 1);
  CHECK(one.offsets[0][0] == 0.01);

  const auto [a, b] = default_shift_sweep(tc);
  CHECK(a[0] == -b[0]);
  const auto s = shift_study(tc, lin, Operation::Area2D, 8, 11, a, b, 3, 2);
  REQUIRE(s.measurements.size() == 11);
  CHECK(s.offsets.front() == a);
  CHECK(s.offsets.back() == b);
  CHECK(s.failed == 0);
  CHECK(s.min_error <= s.median_error);
  CHECK(s.median_error <= s.max_error);
  CHECK(s.max_error < 0.1);

  // Positions outside the domain are rejected before anything runs.
  CHECK_THROWS_AS(shift_study(tc, lin, Operation::Area2D, 8, 5, {0, 0, 0}, {0.4, 0, 0}, 3), std::invalid_argument);
  CHECK_THROWS_AS(shift_study(tc, lin, Operation::Area2D, 8, 0, a, b, 3), std::invalid_argument);
}

TEST_CASE("baseline tolerance examples") {
  const auto base = record_baseline({meas("circle", "linear", Operation::Area2D, 8, Status::Ok, 1e-6)});
  CHECK(compare_to_baseline({meas("circle", "linear", Operation::Area2D, 8, Status::Ok, 1e-9)}, base).passed());

  auto tight = base;
  tight.tolerance.multiplicative = 0.5;
  const auto worse = compare_to_baseline({meas("circle", "linear", Operation::Area2D, 8, Status::Ok, 2e-6)}, tight);
  CHECK_FALSE(worse.passed());
  CHECK(worse.failures() == 1);
  CHECK(worse.verdicts[0].reason.find("limit") != std::string::npos);

  const auto unsup = compare_to_baseline(
      {meas("circle", "linear", Operation::Area2D, 8, Status::Unsupported, std::nullopt)}, base);
  CHECK_FALSE(unsup.passed());
  CHECK(unsup.verdicts[0].reason.find("status changed") != std::string::npos);

  const auto missing = compare_to_baseline({}, base);
  CHECK_FALSE(missing.passed());
  CHECK(missing.verdicts[0].reason == "missing measurement");

  const auto failed = compare_to_baseline(
      {meas("circle", "linear", Operation::Area2D, 8, Status::Failed, std::nullopt)}, base);
  CHECK(failed.execution_errors.size() == 1);

  const auto extra = compare_to_baseline({meas("circle", "linear", Operation::Area2D, 8, Status::Ok, 1e-6),
                                          meas("circle", "linear", Operation::Area2D, 16, Status::Ok, 1.0)},
                                         base);
  CHECK(extra.passed());
  CHECK(extra.extras.size() == 1);
}

TEST_CASE("baseline reflexivity and single perturbation") {
  const auto ms = run_suite(small_suite());
  const auto b = record_baseline(ms);
  CHECK(b.entries.size() == ms.size());
  CHECK(compare_to_baseline(ms, b).passed());
  const auto empty = record_baseline({});
  CHECK(empty.entries.empty());
  CHECK(compare_to_baseline({}, empty).passed());

  for (std::size_t i = 0; i < ms.size(); ++i) {
    auto perturbed = ms;
    perturbed[i].rel_error = *perturbed[i].rel_error * 2 + 1e-9;
    const auto r = compare_to_baseline(perturbed, b);
    CHECK(r.failures() == 1);
    CHECK_FALSE(r.verdicts[i].pass);
  }
}

TEST_CASE("baseline json round trip and errors") {
  const auto ms = run_suite(small_suite());
  const auto b = record_baseline(ms, {}, "2020-01-01T00:00:00Z");
  const auto text = baseline_to_json_text(b);
  const auto back = baseline_from_json_text(text);
  CHECK(back.entries == b.entries);
  CHECK(back.generated_at == "2020-01-01T00:00:00Z");
  CHECK(back.tolerance.absolute == b.tolerance.absolute);
  CHECK(baseline_to_json_text(back) == text);

  try {
    baseline_from_json_text("{\n  \"schema_version\": 1,\n  oops\n}");
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  auto bad = text;
  const auto pos = bad.find("\"area2d\"", bad.find("\"entries\""));
  bad.replace(bad.find("\"area2d\"", pos + 1), 8, "\"mass\"");
  try {
    baseline_from_json_text(bad);
    FAIL("expected a schema error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("entries[1]") != std::string::npos);
  }
  CHECK_THROWS_AS(baseline_from_json_text("{\"schema_version\": 2}"), std::invalid_argument);
  CHECK_THROWS_AS(record_baseline(ms, {0.0, 0.25}), std::invalid_argument);
  CHECK_THROWS_AS(record_baseline({ms[0], ms[0]}), std::invalid_argument);
}
