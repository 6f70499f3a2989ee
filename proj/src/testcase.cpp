#include "cutquad/testcase.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace cutquad {

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::Area: return "area";
    case MeasureKind::Perimeter: return "perimeter";
    case MeasureKind::Volume: return "volume";
    case MeasureKind::SurfaceArea: return "surface_area";
  }
  return "unknown";
}

MeasureKind measure_kind_from_string(const std::string& name) {
  if (name == "area") return MeasureKind::Area;
  if (name == "perimeter") return MeasureKind::Perimeter;
  if (name == "volume") return MeasureKind::Volume;
  if (name == "surface_area") return MeasureKind::SurfaceArea;
  throw std::invalid_argument("unknown measure kind '" + name + "'");
}

std::string to_string(Tier tier) { return tier == Tier::Quick ? "quick" : "extensive"; }

Tier tier_from_string(const std::string& name) {
  if (name == "quick") return Tier::Quick;
  if (name == "extensive") return Tier::Extensive;
  throw std::invalid_argument("unknown tier '" + name + "'");
}

std::optional<double> TestCase::reference(MeasureKind kind) const {
  auto it = references.find(kind);
  if (it == references.end()) return std::nullopt;
  return it->second;
}

double representation_mismatch(const TestCase& tc, int samples_per_curve) {
  if (!tc.loop) return 0.0;
  double worst = 0.0;
  for (const auto& x : tc.loop->sample(samples_per_curve)) {
    worst = std::max(worst, std::abs(tc.level_set(x)));
  }
  return worst / tc.domain.diameter();
}

void require_strictly_inside(const LevelSet& ls, const Box& domain) {
  const Box bb = ls.bounding_box();
  for (int a = 0; a < domain.dim; ++a) {
    if (!(bb.lo[a] > domain.lo[a] && bb.hi[a] < domain.hi[a])) {
      throw std::invalid_argument(fmt::format(
          "interface leaves the domain on axis {}: [{}, {}] not inside ({}, {})", a, bb.lo[a],
          bb.hi[a], domain.lo[a], domain.hi[a]));
    }
  }
}

void validate_testcase(const TestCase& tc) {
  if (tc.id.empty()) throw std::invalid_argument("test case id must not be empty");
  if (tc.dim != 2 && tc.dim != 3) throw std::invalid_argument("test case dim must be 2 or 3");
  if (tc.domain.dim != tc.dim || tc.level_set.dim() != tc.dim) {
    throw std::invalid_argument(fmt::format("test case '{}' mixes dimensions", tc.id));
  }
  tc.domain.validate();
  require_strictly_inside(tc.level_set, tc.domain);
  if (tc.dim == 2 && !tc.loop) {
    throw std::invalid_argument(fmt::format("2D test case '{}' needs a parametric loop", tc.id));
  }
  if (tc.dim == 3 && tc.loop) {
    throw std::invalid_argument(fmt::format("3D test case '{}' cannot carry a curve loop", tc.id));
  }
  for (const auto& [kind, value] : tc.references) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument(
          fmt::format("test case '{}': reference {} must be positive", tc.id, to_string(kind)));
    }
  }
  if (tc.divisions_hint < 1) throw std::invalid_argument("divisions hint must be >= 1");
  const double mismatch = representation_mismatch(tc);
  if (mismatch > kRepresentationTolerance) {
    throw std::invalid_argument(fmt::format(
        "test case '{}': loop and level set disagree (|phi|/diam = {:.3g})", tc.id, mismatch));
  }
}

TestCase make_circle_testcase(const Point& center, double radius, const Box& domain,
                              int divisions_hint, std::string id) {
  TestCase tc;
  tc.id = std::move(id);
  tc.dim = 2;
  tc.domain = domain;
  tc.level_set = LevelSet::circle(center[0], center[1], radius);
  tc.loop = NurbsLoop({make_ellipse_curve(center[0], center[1], radius, radius)});
  tc.references[MeasureKind::Area] = std::numbers::pi * radius * radius;
  tc.references[MeasureKind::Perimeter] = 2.0 * std::numbers::pi * radius;
  tc.tier = Tier::Quick;
  tc.divisions_hint = divisions_hint;
  validate_testcase(tc);
  return tc;
}

TestCase make_ellipse_testcase(const Point& center, double a, double b, const Box& domain,
                               int divisions_hint, std::string id) {
  TestCase tc;
  tc.id = std::move(id);
  tc.dim = 2;
  tc.domain = domain;
  tc.level_set = LevelSet::ellipse(center[0], center[1], a, b);
  tc.loop = NurbsLoop({make_ellipse_curve(center[0], center[1], a, b)});
  const double major = std::max(a, b), minor = std::min(a, b);
  const double e = std::sqrt(1.0 - (minor * minor) / (major * major));
  tc.references[MeasureKind::Area] = std::numbers::pi * a * b;
  tc.references[MeasureKind::Perimeter] = 4.0 * major * std::comp_ellint_2(e);
  tc.tier = Tier::Extensive;
  tc.divisions_hint = divisions_hint;
  validate_testcase(tc);
  return tc;
}

TestCase make_sphere_testcase(const Point& center, double radius, const Box& domain,
                              int divisions_hint, std::string id) {
  TestCase tc;
  tc.id = std::move(id);
  tc.dim = 3;
  tc.domain = domain;
  tc.level_set = LevelSet::sphere(center, radius);
  tc.references[MeasureKind::Volume] = 4.0 * std::numbers::pi * radius * radius * radius / 3.0;
  tc.references[MeasureKind::SurfaceArea] = 4.0 * std::numbers::pi * radius * radius;
  tc.tier = Tier::Extensive;
  tc.divisions_hint = divisions_hint;
  validate_testcase(tc);
  return tc;
}

TestCase translate_testcase(const TestCase& tc, const Point& offset) {
  TestCase out = tc;
  out.level_set = tc.level_set.translated(offset);
  if (tc.loop) out.loop = tc.loop->translated(offset);
  require_strictly_inside(out.level_set, out.domain);
  return out;
}

std::vector<TestCase> builtin_catalog() {
  return {
      make_circle_testcase({0.5, 0.5, 0.0}, 0.2, Box::unit(2), 2, "circle"),
      make_ellipse_testcase({0.5, 0.5, 0.0}, 0.3, 0.15, Box::unit(2), 8, "ellipse"),
      make_sphere_testcase({0.5, 0.5, 0.5}, 0.3, Box::unit(3), 8, "sphere"),
  };
}

}  // namespace cutquad
