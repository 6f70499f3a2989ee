#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cutquad/baseline.hpp"
#include "cutquad/harness.hpp"
#include "cutquad/reporting.hpp"

using namespace cutquad;
namespace fs = std::filesystem;

namespace {

TestCase by_id(const std::string& id) {
  for (auto& tc : builtin_catalog()) {
    if (tc.id == id) return tc;
  }
  throw std::runtime_error("no test case " + id);
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + needle.size())) ++n;
  return n;
}

// Open/close tag balance; void HTML elements, comments and declarations are skipped.
bool balanced_markup(const std::string& s) {
  static const std::set<std::string> void_elements{"meta", "br", "hr", "img", "link", "input"};
  static const std::regex tag(R"re(<(/?)([A-Za-z][A-Za-z0-9-]*)[^>]*?(/?)>)re");
  std::vector<std::string> stack;
  std::string text = std::regex_replace(s, std::regex("<!--[\\s\\S]*?-->"), "");
  text = std::regex_replace(text, std::regex("<![^>]*>"), "");
  text = std::regex_replace(text, std::regex("<\\?[^>]*\\?>"), "");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const std::string name = m[2];
    if (m[3] == "/" || void_elements.contains(name)) continue;
    if (m[1] == "/") {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("cutquad_test_reporting_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<Measurement> sample_measurements() {
  BenchmarkSuite s;
  s.testcases = {by_id("circle"), by_id("sphere")};
  s.integrators = {builtin_registry().create("quadtree"), builtin_registry().create("linear")};
  s.operations = {Operation::Area2D, Operation::Volume3D};
  s.mesh_plan = {2, 4};
  s.order = 2;
  return run_suite(s);
}

}  // namespace

TEST_CASE("measurements csv") {
  CHECK(measurements_csv_text({}) == std::string(kMeasurementsCsvHeader) + "\n");

  BenchmarkSuite s;
  s.testcases = {by_id("circle")};
  s.integrators = {builtin_registry().create("quadtree"), builtin_registry().create("linear")};
  s.operations = {Operation::Area2D};
  s.mesh_plan = {2, 4, 8};
  const auto ms = run_suite(s);
  const auto text = measurements_csv_text(ms);
  CHECK(count(text, "\n") == 7);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(measurements_from_csv_text(text) == ms);

  const auto mixed = sample_measurements();
  const auto back = measurements_from_csv_text(measurements_csv_text(mixed));
  REQUIRE(back.size() == mixed.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].status == mixed[i].status);
    CHECK(back[i].message == mixed[i].message);
    CHECK(back[i].value == mixed[i].value);
    CHECK(back[i].rel_error == mixed[i].rel_error);
  }
  const auto mtext = measurements_csv_text(mixed);
  CHECK(mtext.find("\"unsupported: quadtree does not provide volume3d for 2D cases\"") == std::string::npos);
  CHECK(mtext.find("unsupported: linear does not provide volume3d for 3D cases") != std::string::npos);

  Measurement q;
  q.testcase_id = "c";
  q.integrator_name = "x";
  q.status = Status::Failed;
  q.message = "bad \"value\", really";
  const auto qt = measurements_csv_text({q});
  CHECK(qt.find("\"failed: bad \"\"value\"\", really\"") != std::string::npos);
  CHECK(measurements_from_csv_text(qt)[0].message == q.message);

  CHECK_THROWS(measurements_from_csv_text("a,b\n1,2\n"));
  CHECK_THROWS(measurements_from_csv_text(std::string(kMeasurementsCsvHeader) + "\nc,x,area2d,2,1\n"));
}

TEST_CASE("measurements csv file round trip") {
  const auto dir = scratch("csv");
  const auto ms = sample_measurements();
  write_measurements_csv(ms, dir / "csv" / "m.csv");
  CHECK(read_measurements_csv(dir / "csv" / "m.csv") == ms);
  fs::remove_all(dir);
}

TEST_CASE("quadrature point plot") {
  const auto tc = by_id("circle");
  const CartesianMesh mesh(tc.domain, 2);
  const auto q = tensor_rule(2, Box::unit(2));
  const auto svg = points_svg_text(tc, mesh, q);
  CHECK(count(svg, "class=\"qp\"") == 4);
  CHECK(balanced_markup(svg));

  static const std::regex move(R"re(class="qp" d="M ([^ ]+) ([^ ]+) )re");
  std::vector<Point> parsed;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), move); it != std::sregex_iterator(); ++it) {
    parsed.push_back({std::stod((*it)[1]), std::stod((*it)[2]), 0});
  }
  REQUIRE(parsed.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(parsed[i][0] - q.points[i][0]) <= 1e-9);
    CHECK(std::abs(parsed[i][1] - q.points[i][1]) <= 1e-9);
  }

  const auto empty = points_svg_text(tc, mesh, QuadratureData{});
  CHECK(count(empty, "class=\"qp\"") == 0);
  CHECK(count(empty, "class=\"interface\"") == 1);
  CHECK(balanced_markup(empty));

  static const std::regex poly(R"re(class="interface" points="([^"]*)")re");
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, poly));
  std::istringstream pts(m[1].str());
  std::string pair;
  int n = 0;
  while (pts >> pair) {
    const auto comma = pair.find(',');
    const Point x{std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)), 0};
    CHECK(std::abs(tc.level_set(x)) <= 1e-9);
    ++n;
  }
  CHECK(n == kInterfaceSamples);
}

TEST_CASE("convergence plot") {
  const auto tc = by_id("circle");
  std::vector<ConvergenceTable> tables;
  for (const char* name : {"quadtree", "linear", "flux"}) {
    tables.push_back(convergence_study(tc, builtin_registry().create(name), Operation::Area2D, {2, 4, 8}, 3));
  }
  const auto svg = convergence_svg_text(tables);
  CHECK(count(svg, "class=\"legend-entry\"") == 3);
  CHECK(count(svg, "class=\"npoints\"") == 9);
  CHECK(count(svg, "<g class=\"series\"") == 3);
  CHECK(svg.find("flux (p = saturated)") != std::string::npos);
  CHECK(balanced_markup(svg));
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      CHECK(svg.find(">" + std::to_string(r.measurement.n_points) + "</text>") != std::string::npos);
    }
  }
  CHECK(balanced_markup(convergence_svg_text({})));
}

TEST_CASE("shift plot") {
  ShiftSeries s;
  s.testcase_id = "circle";
  s.integrator_name = "fake";
  for (int k = 0; k < 1000; ++k) {
    Measurement m;
    m.status = Status::Ok;
    m.rel_error = 1e-3;
    s.measurements.push_back(m);
    s.offsets.push_back({k * 1e-4, 0, 0});
  }
  const auto svg = shift_svg_text({s});
  static const std::regex poly(R"re(<polyline class="series" data-integrator="fake" points="([^"]*)")re");
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, poly));
  std::istringstream pts(m[1].str());
  std::string pair;
  std::set<std::string> ys;
  int n = 0;
  while (pts >> pair) {
    ys.insert(pair.substr(pair.find(',') + 1));
    ++n;
  }
  CHECK(n == 1000);
  CHECK(ys.size() == 1);
  CHECK(balanced_markup(svg));

  // Non-ok steps are left out; zero errors sit on the floor.
  s.measurements[10].status = Status::Failed;
  s.measurements[10].rel_error.reset();
  s.measurements[20].rel_error = 0.0;
  const auto svg2 = shift_svg_text({s});
  REQUIRE(std::regex_search(svg2, m, poly));
  std::istringstream pts2(m[1].str());
  n = 0;
  while (pts2 >> pair) ++n;
  CHECK(n == 999);
}

TEST_CASE("html summary") {
  const auto ms = sample_measurements();
  SummaryMetadata meta;
  meta.timestamp = "2020-01-01T00:00:00Z";
  meta.revision = "abc";
  const auto html = html_summary_text(ms, nullptr, {"plots/a.svg"}, meta);
  CHECK(balanced_markup(html));
  CHECK(count(html, "<!-- generated -->") == 1);
  CHECK(count(html, "badge fail") == 0);
  std::size_t unsupported = 0;
  for (const auto& m : ms) unsupported += m.status == Status::Unsupported;
  CHECK(unsupported > 0);
  CHECK(count(html, "<tr class=\"unsupported\">") == unsupported);
  CHECK(html.find("href=\"plots/a.svg\"") != std::string::npos);

  // Everything except the generated line is identical between runs.
  auto meta2 = meta;
  meta2.timestamp = "2030-01-01T00:00:00Z";
  const auto other = html_summary_text(ms, nullptr, {"plots/a.svg"}, meta2);
  auto strip = [](const std::string& s) {
    std::istringstream in(s);
    std::string line, out;
    while (std::getline(in, line)) {
      if (line.find("<!-- generated -->") == std::string::npos) out += line + "\n";
    }
    return out;
  };
  CHECK(strip(html) == strip(other));
  CHECK(html != other);

  const auto base = record_baseline(ms);
  const auto pass = compare_to_baseline(ms, base);
  const auto all_pass = html_summary_text(ms, &pass, {}, meta);
  CHECK(count(all_pass, "badge fail") == 0);
  CHECK(count(all_pass, "badge pass") == ms.size());

  auto perturbed = ms;
  for (auto& m : perturbed) {
    if (m.rel_error) {
      m.rel_error = *m.rel_error * 3 + 1e-6;
      break;
    }
  }
  const auto one_fail = compare_to_baseline(perturbed, base);
  const auto page = html_summary_text(perturbed, &one_fail, {}, meta);
  CHECK(count(page, "badge fail") == 1);
  CHECK(page.find("1 fail</p>") != std::string::npos);

  auto broken = ms;
  broken[0].status = Status::Failed;
  broken[0].message = "boom <b>";
  const auto failed_page = html_summary_text(broken, nullptr, {}, meta);
  CHECK(count(failed_page, "badge fail") == 1);
  CHECK(failed_page.find("boom &lt;b&gt;") != std::string::npos);
  CHECK(balanced_markup(failed_page));
}

TEST_CASE("artifact manifest") {
  const auto dir = scratch("manifest");
  ArtifactLayout layout{dir};
  layout.create();
  CHECK(fs::is_directory(layout.csv()));
  CHECK(fs::is_directory(layout.plots()));
  CHECK(fs::is_directory(layout.summary()));

  ArtifactManifest man;
  man.output_dir = dir;
  write_text_file(layout.csv() / "a.csv", "x\n");
  man.add(layout.csv() / "a.csv", ArtifactKind::Csv, "cutquad run");
  CHECK(man.entries[0].path == fs::path("csv/a.csv"));
  CHECK(man.entries[0].bytes == 2);
  CHECK_NOTHROW(man.validate());
  const auto written = man.write();
  const auto j = nlohmann::json::parse(read_text_file(written));
  CHECK(j.at("artifacts").size() == 1);
  CHECK(j.at("artifacts")[0].at("kind") == "csv");
  CHECK(j.at("artifacts")[0].at("command") == "cutquad run");

  write_text_file(layout.plots() / "empty.svg", "");
  man.add(layout.plots() / "empty.svg", ArtifactKind::Svg, "cutquad run");
  CHECK_THROWS_AS(man.validate(), std::runtime_error);
  man.entries.pop_back();
  man.add(layout.plots() / "missing.svg", ArtifactKind::Svg, "cutquad run");
  CHECK_THROWS_AS(man.validate(), std::runtime_error);
  CHECK_THROWS(man.write());
  fs::remove_all(dir);
}

TEST_CASE("text files use LF") {
  const auto dir = scratch("text");
  write_text_file(dir / "deep" / "f.txt", "a\nb\n");
  CHECK(read_text_file(dir / "deep" / "f.txt") == "a\nb\n");
  CHECK(fs::file_size(dir / "deep" / "f.txt") == 4);
  CHECK_THROWS(read_text_file(dir / "none.txt"));
  fs::remove_all(dir);
}
