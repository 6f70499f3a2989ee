#include "cutquad/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iterator>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace cutquad {

std::string to_string(TierSelection t) {
  switch (t) {
    case TierSelection::Quick: return "quick";
    case TierSelection::Extensive: return "extensive";
    case TierSelection::All: return "all";
  }
  return "unknown";
}

TierSelection tier_selection_from_string(const std::string& name) {
  if (name == "quick") return TierSelection::Quick;
  if (name == "extensive") return TierSelection::Extensive;
  if (name == "all") return TierSelection::All;
  throw std::invalid_argument("unknown tier '" + name + "' (quick, extensive, all)");
}

void BenchmarkSuite::validate() const {
  if (testcases.empty()) throw std::invalid_argument("suite has no test cases");
  if (integrators.empty()) throw std::invalid_argument("suite has no integrators");
  if (operations.empty()) throw std::invalid_argument("suite has no operations");
  if (mesh_plan.empty()) throw std::invalid_argument("suite has an empty mesh plan");
  for (std::size_t i = 0; i < mesh_plan.size(); ++i) {
    if (mesh_plan[i] < 1) throw std::invalid_argument("mesh divisions must be >= 1");
    if (i > 0 && mesh_plan[i] <= mesh_plan[i - 1]) {
      throw std::invalid_argument("mesh plan must be strictly increasing");
    }
  }
  for (const auto& a : integrators) {
    if (!a) throw std::invalid_argument("suite holds a null integrator");
  }
  gauss_legendre(order);
}

namespace {

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <typename F>
void parallel_for(std::size_t count, int threads, F&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

}  // namespace

Measurement make_measurement(const TestCase& tc, const std::string& integrator, Operation op,
                             int divisions, const IntegrationResult& result) {
  Measurement m;
  m.testcase_id = tc.id;
  m.integrator_name = integrator;
  m.operation = op;
  m.mesh_divisions = divisions;
  m.reference = tc.reference(operation_measure(op));
  m.status = result.status;
  m.message = result.message;
  m.runtime_s = result.runtime_s;
  if (result.ok()) {
    m.value = result.value;
    m.n_points = result.n_points;
    if (m.reference) m.rel_error = std::abs(result.value - *m.reference) / std::abs(*m.reference);
  }
  return m;
}

Measurement measure(const TestCase& tc, const Integrator& integrator, Operation op, int divisions,
                    int order, bool timing) {
  Measurement m;
  try {
    const CartesianMesh mesh(tc.domain, divisions);
    IntegrationResult r = integrator.compute(op, tc, mesh, order);
    if (timing && r.ok()) {
      std::vector<double> runtimes{r.runtime_s};
      for (int rep = 0; rep < 2; ++rep) runtimes.push_back(integrator.compute(op, tc, mesh, order).runtime_s);
      std::sort(runtimes.begin(), runtimes.end());
      r.runtime_s = runtimes[1];
    }
    m = make_measurement(tc, integrator.name(), op, divisions, r);
  } catch (const std::exception& e) {
    IntegrationResult failed;
    failed.status = Status::Failed;
    failed.message = e.what();
    m = make_measurement(tc, integrator.name(), op, divisions, failed);
  }
  if (!timing) m.runtime_s = 0.0;
  return m;
}

std::vector<Measurement> run_suite(const BenchmarkSuite& suite) {
  suite.validate();
  const std::size_t n_int = suite.integrators.size();
  const std::size_t per_pair = suite.operations.size() * suite.mesh_plan.size();
  const std::size_t pairs = suite.testcases.size() * n_int;
  std::vector<Measurement> out(pairs * per_pair);

  parallel_for(pairs, suite.timing ? 1 : suite.threads, [&](std::size_t pair) {
    const TestCase& tc = suite.testcases[pair / n_int];
    const Integrator& integrator = *suite.integrators[pair % n_int];
    std::size_t slot = pair * per_pair;
    for (Operation op : suite.operations) {
      for (int divisions : suite.mesh_plan) {
        out[slot++] = measure(tc, integrator, op, divisions, suite.order, suite.timing);
      }
    }
  });
  return out;
}

// Convergence ---------------------------------------------------------------

std::string ConvergenceTable::order_text() const {
  return order ? fmt::format("{:.4f}", *order) : std::string("saturated");
}

std::optional<double> estimate_order(const std::vector<double>& h, const std::vector<double>& errors) {
  if (h.size() != errors.size()) throw std::invalid_argument("estimate_order: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (errors[i] > kErrorFloor && h[i] > 0.0 && std::isfinite(errors[i])) {
      lx.push_back(std::log(h[i]));
      ly.push_back(std::log(errors[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

ConvergenceTable convergence_study(const TestCase& tc, const IntegratorPtr& integrator, Operation op,
                                   const std::vector<int>& mesh_plan, int order) {
  if (mesh_plan.size() < 2) throw std::invalid_argument("convergence study needs at least two meshes");
  BenchmarkSuite suite;
  suite.testcases = {tc};
  suite.integrators = {integrator};
  suite.operations = {op};
  suite.mesh_plan = mesh_plan;
  suite.order = order;
  const auto measurements = run_suite(suite);

  ConvergenceTable table;
  table.testcase_id = tc.id;
  table.integrator_name = integrator->name();
  table.operation = op;
  std::vector<double> hs, errs;
  for (const auto& m : measurements) {
    ConvergenceRow row;
    row.divisions = m.mesh_divisions;
    row.h = tc.domain.width(0) / m.mesh_divisions;
    row.measurement = m;
    if (m.rel_error) {
      hs.push_back(row.h);
      errs.push_back(*m.rel_error);
    }
    table.rows.push_back(std::move(row));
  }
  table.order = estimate_order(hs, errs);
  return table;
}

std::vector<ConvergenceTable> convergence_tables(const std::vector<Measurement>& measurements,
                                                 const std::vector<TestCase>& testcases) {
  std::vector<ConvergenceTable> tables;
  for (const auto& m : measurements) {
    auto it = std::find_if(tables.begin(), tables.end(), [&](const ConvergenceTable& t) {
      return t.testcase_id == m.testcase_id && t.integrator_name == m.integrator_name &&
             t.operation == m.operation;
    });
    if (it == tables.end()) {
      tables.push_back({m.testcase_id, m.integrator_name, m.operation, {}, std::nullopt});
      it = std::prev(tables.end());
    }
    auto tc = std::find_if(testcases.begin(), testcases.end(),
                           [&](const TestCase& t) { return t.id == m.testcase_id; });
    const double width = tc == testcases.end() ? 1.0 : tc->domain.width(0);
    it->rows.push_back({m.mesh_divisions, width / m.mesh_divisions, m});
  }
  std::erase_if(tables, [](const ConvergenceTable& t) { return t.rows.size() < 2; });
  for (auto& t : tables) {
    std::vector<double> hs, errs;
    for (const auto& row : t.rows) {
      if (!row.measurement.rel_error) continue;
      hs.push_back(row.h);
      errs.push_back(*row.measurement.rel_error);
    }
    t.order = estimate_order(hs, errs);
  }
  return tables;
}

// Geometry shift ------------------------------------------------------------

std::pair<Point, Point> default_shift_sweep(const TestCase& tc) {
  const Box bb = tc.level_set.bounding_box();
  const double clearance = std::min(bb.lo[0] - tc.domain.lo[0], tc.domain.hi[0] - bb.hi[0]);
  const double reach = std::min(0.25, 0.9 * clearance);
  return {Point{-reach, 0.0, 0.0}, Point{reach, 0.0, 0.0}};
}

ShiftSeries shift_study(const TestCase& tc, const IntegratorPtr& integrator, Operation op,
                        int mesh_divisions, int steps, const Point& start, const Point& end, int order,
                        int threads) {
  if (steps < 1) throw std::invalid_argument("shift study needs at least one step");
  if (mesh_divisions < 1) throw std::invalid_argument("mesh divisions must be >= 1");
  ShiftSeries series;
  series.testcase_id = tc.id;
  series.integrator_name = integrator->name();
  series.operation = op;
  series.mesh_divisions = mesh_divisions;

  std::vector<TestCase> positions;
  positions.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    const double s = steps == 1 ? 0.0 : static_cast<double>(k) / (steps - 1);
    Point offset{};
    for (int a = 0; a < 3; ++a) offset[a] = start[a] + s * (end[a] - start[a]);
    try {
      positions.push_back(translate_testcase(tc, offset));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(fmt::format("shift step {} is invalid: {}", k, e.what()));
    }
    series.offsets.push_back(offset);
  }

  series.measurements.resize(positions.size());
  parallel_for(positions.size(), threads, [&](std::size_t k) {
    series.measurements[k] = measure(positions[k], *integrator, op, mesh_divisions, order, false);
  });

  std::vector<double> errs;
  for (const auto& m : series.measurements) {
    if (m.status == Status::Failed) ++series.failed;
    if (m.status == Status::Unsupported) ++series.unsupported;
    if (m.rel_error) errs.push_back(*m.rel_error);
  }
  if (!errs.empty()) {
    series.max_error = *std::max_element(errs.begin(), errs.end());
    series.min_error = *std::min_element(errs.begin(), errs.end());
    std::vector<double> sorted = errs;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    series.median_error = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  }
  return series;
}

}  // namespace cutquad
