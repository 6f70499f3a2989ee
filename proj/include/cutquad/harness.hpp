#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cutquad/integrator.hpp"
#include "cutquad/testcase.hpp"

namespace cutquad {

enum class TierSelection { Quick, Extensive, All };
std::string to_string(TierSelection t);
TierSelection tier_selection_from_string(const std::string& name);

/// The benchmark matrix: test cases x integrators x operations x meshes.
struct BenchmarkSuite {
  std::vector<TestCase> testcases;
  std::vector<IntegratorPtr> integrators;
  std::vector<Operation> operations;
  /// Uniform divisions per axis, strictly increasing.
  std::vector<int> mesh_plan;
  TierSelection tier = TierSelection::All;
  /// Gauss order per cell (tensor / triangle / segment rules).
  int order = 5;
  /// Timing mode: median of 3 serialized calls. Off: one call, runtime 0.
  bool timing = false;
  /// Worker threads for (test case, integrator) pairs; ignored when timing.
  int threads = 1;
  /// Whether shift studies belong to this suite (extensive tier).
  bool shift_studies = false;

  /// Throws std::invalid_argument for empty sets or a non-increasing plan.
  void validate() const;
};

/// One m(test case, integrator) record.
struct Measurement {
  std::string testcase_id;
  std::string integrator_name;
  Operation operation = Operation::Area2D;
  int mesh_divisions = 0;
  double value = 0.0;
  std::optional<double> reference;
  /// |value - reference| / |reference| when ok and a reference exists.
  std::optional<double> rel_error;
  std::size_t n_points = 0;
  double runtime_s = 0.0;
  Status status = Status::Unsupported;
  std::string message;

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

Measurement make_measurement(const TestCase& tc, const std::string& integrator, Operation op,
                             int divisions, const IntegrationResult& result);

/// Runs `op` on a fresh uniform mesh; in timing mode the call is repeated
/// three times and the median runtime is kept.
Measurement measure(const TestCase& tc, const Integrator& integrator, Operation op, int divisions,
                    int order, bool timing);

/// One measurement per (test case, integrator, operation, mesh), in that
/// nesting order. Unsupported and failed combinations are recorded, never
/// dropped; a failing pair never affects another.
std::vector<Measurement> run_suite(const BenchmarkSuite& suite);

// Convergence ---------------------------------------------------------------

struct ConvergenceRow {
  int divisions = 0;
  double h = 0.0;
  Measurement measurement;
};

struct ConvergenceTable {
  std::string testcase_id;
  std::string integrator_name;
  Operation operation = Operation::Area2D;
  std::vector<ConvergenceRow> rows;
  /// Fitted order; empty when every error sits at the floating floor.
  std::optional<double> order;

  std::string order_text() const;
};

inline constexpr double kErrorFloor = 1e-14;

/// Least-squares slope of log(error) against log(h) over errors above the
/// floor, i.e. p in error ~ C h^p. Empty if fewer than two points qualify.
std::optional<double> estimate_order(const std::vector<double>& h, const std::vector<double>& errors);

/// Runs the mesh plan through run_suite and fits the order. Needs >= 2 meshes.
ConvergenceTable convergence_study(const TestCase& tc, const IntegratorPtr& integrator, Operation op,
                                   const std::vector<int>& mesh_plan, int order = 5);

/// Groups suite measurements into one table per (test case, integrator,
/// operation) with at least two meshes, in first-appearance order.
std::vector<ConvergenceTable> convergence_tables(const std::vector<Measurement>& measurements,
                                                 const std::vector<TestCase>& testcases);

// Geometry shift ------------------------------------------------------------

struct ShiftSeries {
  std::string testcase_id;
  std::string integrator_name;
  Operation operation = Operation::Area2D;
  int mesh_divisions = 0;
  std::vector<Point> offsets;
  std::vector<Measurement> measurements;

  double max_error = 0.0;
  double min_error = 0.0;
  double median_error = 0.0;
  std::size_t failed = 0;
  std::size_t unsupported = 0;
};

/// Moves the interface from `start` to `end` in `steps` equal increments
/// through a fixed mesh. Every position is validated before anything runs.
ShiftSeries shift_study(const TestCase& tc, const IntegratorPtr& integrator, Operation op,
                        int mesh_divisions, int steps, const Point& start, const Point& end,
                        int order = 5, int threads = 1);

/// Symmetric x-sweep for a catalog case: +/- min(0.25, 0.9 * clearance).
std::pair<Point, Point> default_shift_sweep(const TestCase& tc);

}  // namespace cutquad
