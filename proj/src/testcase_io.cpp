#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "cutquad/testcase.hpp"
#include "json_util.hpp"

namespace cutquad {

using nlohmann::json;

namespace {

json point_to_json(const Point& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

Point point_from_json(const json& j, int dim, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw std::invalid_argument(fmt::format("'{}' must be an array of {} numbers", what, dim));
  }
  Point p{};
  for (int i = 0; i < dim; ++i) p[i] = j.at(i).get<double>();
  return p;
}

json curve_to_json(const NurbsCurve& c) {
  json cps = json::array();
  for (const auto& p : c.control_points()) cps.push_back(point_to_json(p, 2));
  return {{"degree", c.degree()},
          {"knots", c.knots()},
          {"control_points", cps},
          {"weights", c.weights()}};
}

NurbsCurve curve_from_json(const json& j) {
  std::vector<Point> cps;
  for (const auto& p : j.at("control_points")) cps.push_back(point_from_json(p, 2, "control_points[]"));
  return NurbsCurve(j.at("degree").get<int>(), j.at("knots").get<std::vector<double>>(),
                    std::move(cps), j.at("weights").get<std::vector<double>>());
}

}  // namespace

std::string testcase_to_json_text(const TestCase& tc) {
  const auto& ls = tc.level_set;
  json radii = ls.kind() == LevelSetKind::Ellipse ? point_to_json(ls.radii(), tc.dim)
                                                   : json::array({ls.radii()[0]});
  json j = {
      {"id", tc.id},
      {"dim", tc.dim},
      {"tier", to_string(tc.tier)},
      {"divisions", tc.divisions_hint},
      {"domain", {{"lo", point_to_json(tc.domain.lo, tc.dim)}, {"hi", point_to_json(tc.domain.hi, tc.dim)}}},
      {"level_set",
       {{"kind", to_string(ls.kind())},
        {"center", point_to_json(ls.center(), tc.dim)},
        {"radii", radii},
        {"shift", point_to_json(ls.shift(), tc.dim)}}},
  };
  if (tc.loop) {
    json curves = json::array();
    for (const auto& c : tc.loop->curves()) curves.push_back(curve_to_json(c));
    j["loop"] = curves;
  }
  json refs = json::object();
  for (const auto& [k, v] : tc.references) refs[to_string(k)] = v;
  j["references"] = refs;
  return j.dump(2) + "\n";
}

TestCase testcase_from_json_text(const std::string& text) {
  const json j = detail::parse_json_with_lines(text);
  try {
    TestCase tc;
    tc.id = j.at("id").get<std::string>();
    tc.dim = j.at("dim").get<int>();
    if (tc.dim != 2 && tc.dim != 3) throw std::invalid_argument("'dim' must be 2 or 3");
    tc.tier = tier_from_string(j.value("tier", std::string("extensive")));
    tc.divisions_hint = j.value("divisions", 8);
    tc.domain.dim = tc.dim;
    tc.domain.lo = point_from_json(j.at("domain").at("lo"), tc.dim, "domain.lo");
    tc.domain.hi = point_from_json(j.at("domain").at("hi"), tc.dim, "domain.hi");

    const json& ls = j.at("level_set");
    const auto kind = level_set_kind_from_string(ls.at("kind").get<std::string>());
    const Point center = point_from_json(ls.at("center"), tc.dim, "level_set.center");
    Point radii{1.0, 1.0, 1.0};
    const auto& rj = ls.at("radii");
    if (kind == LevelSetKind::Ellipse) {
      radii = point_from_json(rj, tc.dim, "level_set.radii");
    } else {
      if (!rj.is_array() || (rj.size() != 1 && static_cast<int>(rj.size()) != tc.dim)) {
        throw std::invalid_argument("'level_set.radii' must hold one radius");
      }
      for (int a = 0; a < tc.dim; ++a) radii[a] = rj.at(0).get<double>();
    }
    Point shift{};
    if (ls.contains("shift")) shift = point_from_json(ls.at("shift"), tc.dim, "level_set.shift");
    tc.level_set = LevelSet(kind, tc.dim, center, radii, shift);

    if (j.contains("loop")) {
      std::vector<NurbsCurve> curves;
      for (const auto& c : j.at("loop")) curves.push_back(curve_from_json(c));
      tc.loop = NurbsLoop(std::move(curves));
    }
    if (j.contains("references")) {
      for (const auto& [k, v] : j.at("references").items()) {
        tc.references[measure_kind_from_string(k)] = v.get<double>();
      }
    }
    validate_testcase(tc);
    return tc;
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("malformed test case: {}", e.what()));
  }
}

TestCase load_testcase(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open test case file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return testcase_from_json_text(ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void save_testcase(const TestCase& tc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << testcase_to_json_text(tc);
}

std::vector<TestCase> load_catalog(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::invalid_argument("test case directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<TestCase> out;
  for (const auto& f : files) out.push_back(load_testcase(f));
  return out;
}

}  // namespace cutquad
