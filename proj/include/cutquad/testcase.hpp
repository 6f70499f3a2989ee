#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cutquad/geometry.hpp"
#include "cutquad/nurbs.hpp"

namespace cutquad {

enum class MeasureKind { Area, Perimeter, Volume, SurfaceArea };
enum class Tier { Quick, Extensive };

std::string to_string(MeasureKind kind);
MeasureKind measure_kind_from_string(const std::string& name);
std::string to_string(Tier tier);
Tier tier_from_string(const std::string& name);

/// One benchmark problem. 2D cases carry both interface representations;
/// 3D cases are implicit only.
struct TestCase {
  std::string id;
  int dim = 2;
  Box domain;
  LevelSet level_set;
  std::optional<NurbsLoop> loop;
  std::map<MeasureKind, double> references;
  Tier tier = Tier::Extensive;
  /// Suggested mesh resolution for single-mesh runs.
  int divisions_hint = 8;

  std::optional<double> reference(MeasureKind kind) const;

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

/// Max |phi| over `samples_per_curve` uniform loop samples, divided by the
/// domain diameter. Zero for cases without a loop.
double representation_mismatch(const TestCase& tc, int samples_per_curve = 64);

inline constexpr double kRepresentationTolerance = 1e-10;

/// Checks every TestCase invariant; throws std::invalid_argument.
void validate_testcase(const TestCase& tc);

/// Throws std::invalid_argument unless the level set's bounding box lies
/// strictly inside the domain.
void require_strictly_inside(const LevelSet& ls, const Box& domain);

TestCase make_circle_testcase(const Point& center, double radius, const Box& domain,
                              int divisions_hint = 2, std::string id = "circle");
TestCase make_ellipse_testcase(const Point& center, double a, double b, const Box& domain,
                               int divisions_hint = 8, std::string id = "ellipse");
TestCase make_sphere_testcase(const Point& center, double radius, const Box& domain,
                              int divisions_hint = 8, std::string id = "sphere");

/// Moves both representations by `offset`; references are unchanged.
TestCase translate_testcase(const TestCase& tc, const Point& offset);

/// circle (quick), ellipse and sphere (extensive).
std::vector<TestCase> builtin_catalog();

/// Test-case definition files (one JSON document per case).
TestCase testcase_from_json_text(const std::string& text);
std::string testcase_to_json_text(const TestCase& tc);
TestCase load_testcase(const std::filesystem::path& path);
void save_testcase(const TestCase& tc, const std::filesystem::path& path);

/// Loads every *.json file in `dir`, sorted by file name.
std::vector<TestCase> load_catalog(const std::filesystem::path& dir);

}  // namespace cutquad
