#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cutquad/cut_cell.hpp"
#include "cutquad/quadrature.hpp"
#include "cutquad/testcase.hpp"

using namespace cutquad;
using doctest::Approx;

namespace {

const LevelSet kCircle = LevelSet::circle(0.5, 0.5, 0.2);
const double kCircleArea = std::numbers::pi * 0.04;

double monomial_integral(int d) { return d % 2 ? 0.0 : 2.0 / (d + 1); }

Box box2(double x0, double y0, double x1, double y1) { return Box{2, {x0, y0, 0}, {x1, y1, 0}}; }

}  // namespace

TEST_CASE("gauss legendre small rules") {
  const auto& g1 = gauss_legendre(1);
  REQUIRE(g1.nodes.size() == 1);
  CHECK(g1.nodes[0] == 0.0);
  CHECK(g1.weights[0] == Approx(2.0).epsilon(1e-15));
  const auto& g2 = gauss_legendre(2);
  CHECK(std::abs(std::abs(g2.nodes[0]) - 0.5773502691896257) < 1e-15);
  CHECK(std::abs(g2.nodes[0] + g2.nodes[1]) < 1e-15);
  CHECK(g2.weights[0] == Approx(1.0).epsilon(1e-15));
  CHECK(g2.weights[1] == Approx(1.0).epsilon(1e-15));

  const auto& g5 = gauss_legendre(5);
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) s += g5.weights[i] * std::pow(g5.nodes[i], 8);
  CHECK(std::abs(s - 2.0 / 9.0) < 1e-13);

  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(65), std::invalid_argument);
  CHECK_NOTHROW(gauss_legendre(64));
}

TEST_CASE("gauss legendre exactness for n in 1..16") {
  for (int n = 1; n <= 16; ++n) {
    const auto& g = gauss_legendre(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], d);
      CHECK_MESSAGE(std::abs(s - monomial_integral(d)) <= 1e-13, "n=" << n << " d=" << d);
    }
  }
}

TEST_CASE("gauss legendre nodes are sorted, symmetric and positive-weighted") {
  for (int n : {3, 10, 33, 64}) {
    const auto& g = gauss_legendre(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(g.weights[i] > 0.0);
      CHECK(std::abs(g.nodes[i] + g.nodes[n - 1 - i]) < 1e-14);
      if (i) CHECK(g.nodes[i] > g.nodes[i - 1]);
      total += g.weights[i];
    }
    CHECK(total == Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("tensor rules") {
  const auto q = tensor_rule(2, Box::unit(2));
  CHECK(q.size() == 4);
  CHECK(rule_total(q) == Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(integrate(q, [](const Point& x) { return x[0] * x[1]; }) - 0.25) < 1e-14);

  const auto q3 = tensor_rule(3, Box{3, {0, 0, 0}, {0.5, 0.5, 0.5}});
  CHECK(q3.size() == 27);
  CHECK(rule_total(q3) == Approx(0.125).epsilon(1e-15));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const int dim = 2 + k % 2;
    Box b{dim, {}, {}};
    for (int a = 0; a < dim; ++a) {
      const double x = u(rng), y = u(rng);
      b.lo[a] = std::min(x, y);
      b.hi[a] = std::max(x, y) + 1e-3;
    }
    CHECK(std::abs(rule_total(tensor_rule(1 + k % 7, b)) - b.measure()) <= 1e-14 * std::max(1.0, b.measure()));
  }
}

TEST_CASE("empty rule total is zero") { CHECK(rule_total(QuadratureData{}) == 0.0); }

TEST_CASE("cell classification") {
  CHECK(classify_cell(kCircle, box2(0, 0, 0.25, 0.25)) == CellClass::Outside);
  CHECK(classify_cell(kCircle, box2(0.4, 0.4, 0.6, 0.6)) == CellClass::Inside);
  const Box cut = box2(0.25, 0.375, 0.5, 0.625);
  CHECK(kCircle(Point{0.25, 0.375, 0}) > 0.0);
  CHECK(kCircle(Point{0.5, 0.5, 0}) < 0.0);
  CHECK(classify_cell(kCircle, cut) == CellClass::Cut);
  // A sample exactly on the interface forces Cut.
  CHECK(classify_cell(kCircle, box2(0.7, 0.5, 0.8, 0.6)) == CellClass::Cut);
}

TEST_CASE("classification is conservative under sampling refinement") {
  const auto catalog = builtin_catalog();
  for (const auto& tc : catalog) {
    if (tc.dim != 2) continue;
    for (int n : {2, 8, 32, 64}) {
      for (const auto& cell : mesh_cells(CartesianMesh(tc.domain, n))) {
        const auto coarse = classify_cell(tc.level_set, cell.box, 3);
        for (int s : {5, 9}) {
          const auto fine = classify_cell(tc.level_set, cell.box, s);
          if (coarse == CellClass::Inside) CHECK(fine != CellClass::Outside);
          if (coarse == CellClass::Outside) CHECK(fine != CellClass::Inside);
        }
      }
    }
  }
}

TEST_CASE("quadrature csv") {
  QuadratureData q;
  q.add({0.1, 0.2, 0}, 0.5, 3);
  q.add({1.0 / 3.0, 0.7, 0}, 0.25);
  const auto text = quadrature_csv_text(q);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,y,weight,cell");
  std::getline(in, line);
  CHECK(line == "0.10000000000000001,0.20000000000000001,0.5,3");
  std::getline(in, line);
  CHECK(line == "0.33333333333333331,0.69999999999999996,0.25,");
  QuadratureData q3;
  q3.dim = 3;
  q3.add({0, 0, 1}, 1.0);
  CHECK(quadrature_csv_text(q3).rfind("x,y,z,weight,cell\n", 0) == 0);
}

TEST_CASE("quadrature validation") {
  QuadratureData q;
  q.add({0, 0, 0}, 1.0);
  CHECK_NOTHROW(q.validate());
  q.weights.push_back(1.0);
  CHECK_THROWS(q.validate());
  QuadratureData bad;
  bad.add({0, 0, 0}, std::nan(""));
  CHECK_THROWS(bad.validate());
}

TEST_CASE("quadtree basic cells") {
  const Box inside = box2(0.45, 0.45, 0.55, 0.55);
  const auto qi = quadtree_quadrature(kCircle, inside, 5, 3);
  CHECK(qi.size() == 9);
  CHECK(rule_total(qi) == Approx(inside.measure()).epsilon(1e-15));
  CHECK(quadtree_quadrature(kCircle, box2(0, 0, 0.1, 0.1), 5, 3).empty());
  CHECK_THROWS_AS(quadtree_quadrature(kCircle, Box::unit(2), 13, 3), std::invalid_argument);
  for (const double w : qi.weights) CHECK(w > 0.0);
}

TEST_CASE("quadtree single cell depth 8") {
  const auto q = quadtree_quadrature(kCircle, Box::unit(2), 8, 5);
  CHECK(std::abs(rule_total(q) - kCircleArea) / kCircleArea <= 2e-3);
}

TEST_CASE("quadtree 8x8 depth 6 against an exact-classification oracle") {
  // Same leaf policy with exact box/circle intersection tests.
  std::function<double(double, double, double, double, int)> oracle = [&](double x0, double y0, double x1, double y1,
                                                                           int d) -> double {
    const double dx = std::max({x0 - 0.5, 0.0, 0.5 - x1}), dy = std::max({y0 - 0.5, 0.0, 0.5 - y1});
    const double dmin = std::hypot(dx, dy);
    const double dmax = std::hypot(std::max(std::abs(x0 - 0.5), std::abs(x1 - 0.5)),
                                   std::max(std::abs(y0 - 0.5), std::abs(y1 - 0.5)));
    const double a = (x1 - x0) * (y1 - y0);
    if (dmax < 0.2) return a;
    if (dmin > 0.2) return 0.0;
    if (d == 0) return std::hypot((x0 + x1) / 2 - 0.5, (y0 + y1) / 2 - 0.5) <= 0.2 ? a : 0.0;
    const double xm = (x0 + x1) / 2, ym = (y0 + y1) / 2;
    return oracle(x0, y0, xm, ym, d - 1) + oracle(xm, y0, x1, ym, d - 1) + oracle(x0, ym, xm, y1, d - 1) +
           oracle(xm, ym, x1, y1, d - 1);
  };
  double total = 0.0, expected = 0.0;
  for (const auto& c : mesh_cells(CartesianMesh(Box::unit(2), 8))) {
    total += rule_total(quadtree_quadrature(kCircle, c.box, 6, 5));
    expected += oracle(c.box.lo[0], c.box.lo[1], c.box.hi[0], c.box.hi[1], 6);
  }
  CHECK(std::abs(total - expected) < 1e-13);
  const double leaf = 0.125 / 64;
  CHECK(std::abs(total - kCircleArea) <= 2 * (2 * std::numbers::pi * 0.2) * leaf);
}

TEST_CASE("quadtree error decreases with depth") {
  for (int n : {2, 8}) {
    double prev = INFINITY;
    for (int depth : {2, 4, 6}) {
      double total = 0.0;
      for (const auto& c : mesh_cells(CartesianMesh(Box::unit(2), n))) {
        total += rule_total(quadtree_quadrature(kCircle, c.box, depth, 3));
      }
      const double err = std::abs(total - kCircleArea);
      CHECK(err <= prev);
      prev = err;
    }
  }
}

TEST_CASE("marching squares half plane") {
  const ImplicitField half = [](const Point& x) { return x[0] - 0.5; };
  const auto r = marching_squares_polygon(half, Box::unit(2));
  REQUIRE(r.polygons.size() == 1);
  REQUIRE(r.segments.size() == 1);
  CHECK(shoelace_area(r.polygons[0]) == 0.5);
  CHECK(r.segments[0].length() == Approx(1.0).epsilon(1e-15));
  CHECK(r.segments[0].normal[0] == Approx(1.0));
  const auto& p = r.polygons[0];
  REQUIRE(p.size() == 4);
  // Same vertex set as (0,0),(0.5,0),(0.5,1),(0,1).
  for (const Point& v : {Point{0, 0, 0}, Point{0.5, 0, 0}, Point{0.5, 1, 0}, Point{0, 1, 0}}) {
    bool found = false;
    for (const Point& q : p) found = found || (std::abs(q[0] - v[0]) < 1e-15 && std::abs(q[1] - v[1]) < 1e-15);
    CHECK(found);
  }
  CHECK_FALSE(r.fallback);
}

TEST_CASE("marching squares roots lie on the circle") {
  const Box cut = box2(0.25, 0.375, 0.5, 0.625);
  const auto r = marching_squares_polygon(kCircle, cut);
  REQUIRE_FALSE(r.segments.empty());
  for (const auto& s : r.segments) {
    CHECK(std::abs(kCircle(s.a)) <= 1e-13);
    CHECK(std::abs(kCircle(s.b)) <= 1e-13);
    // Outward normal points away from the center.
    const Point mid{(s.a[0] + s.b[0]) / 2, (s.a[1] + s.b[1]) / 2, 0};
    CHECK(s.normal[0] * (mid[0] - 0.5) + s.normal[1] * (mid[1] - 0.5) > 0.0);
  }
  for (const auto& poly : r.polygons) CHECK(shoelace_area(poly) > 0.0);
}

TEST_CASE("marching squares saddle and fallback") {
  // Inside at two diagonal corners, outside at the center.
  const ImplicitField saddle = [](const Point& x) { return 4 * (x[0] - 0.5) * (x[1] - 0.5) + 0.1; };
  const auto r = marching_squares_polygon(saddle, Box::unit(2));
  CHECK(r.polygons.size() == 2);
  CHECK(r.segments.size() == 2);
  double area = 0.0;
  for (const auto& poly : r.polygons) area += shoelace_area(poly);
  CHECK(area > 0.0);
  CHECK(area < 0.5);

  // Cut by classification but no corner sign change.
  const ImplicitField bump = [](const Point& x) { return std::hypot(x[0] - 0.5, x[1] - 0.5) - 0.1; };
  const auto f = marching_squares_polygon(bump, Box::unit(2));
  CHECK(f.fallback);
  REQUIRE(f.polygons.size() == 1);
  CHECK(shoelace_area(f.polygons[0]) == Approx(1.0));
}

TEST_CASE("polygon quadrature") {
  const Polygon square{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const auto q = polygon_quadrature(square, 2);
  CHECK(std::abs(rule_total(q) - 1.0) <= 1e-14);
  const Polygon tri{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  const auto qt = polygon_quadrature(tri, 3);
  CHECK(std::abs(integrate(qt, [](const Point& x) { return x[0]; }) - 1.0 / 6.0) <= 1e-13);
  CHECK(polygon_quadrature({{0, 0, 0}, {1, 1, 0}, {2, 2, 0}}, 3).empty());

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    // Random convex pentagon from sorted angles.
    std::vector<double> ang;
    for (int i = 0; i < 5; ++i) ang.push_back(2 * std::numbers::pi * u(rng));
    std::sort(ang.begin(), ang.end());
    Polygon p;
    for (double a : ang) p.push_back({0.5 + 0.3 * std::cos(a), 0.5 + 0.3 * std::sin(a), 0});
    const double area = shoelace_area(p);
    if (area < 1e-6) continue;
    CHECK(std::abs(rule_total(polygon_quadrature(p, 4)) - area) <= 1e-13);
  }
}

TEST_CASE("moment fitting half plane") {
  const ImplicitField half = [](const Point& x) { return x[0] - 0.5; };
  const auto r = moment_fit_cell(half, Box::unit(2), 2, 4);
  CHECK(r.residual <= kMomentResidualTolerance);
  CHECK(std::abs(integrate(r.rule, [](const Point& x) { return x[0]; }) - 0.125) <= 1e-10);
  CHECK(std::abs(rule_total(r.rule) - 0.5) <= 1e-10);
  CHECK(std::abs(integrate(r.rule, [](const Point& x) { return x[1] * x[1]; }) - 0.5 / 3.0) <= 1e-10);
  CHECK(std::abs(integrate(r.rule, [](const Point& x) { return x[0] * x[1]; }) - 0.0625) <= 1e-10);
}

TEST_CASE("moment fitting inside cell short circuits") {
  const Box inside = box2(0.45, 0.45, 0.55, 0.55);
  const auto r = moment_fit_cell(kCircle, inside, 3, 4);
  const auto t = tensor_rule(4, inside);
  CHECK(r.rule.points == t.points);
  CHECK(r.rule.weights == t.weights);
  CHECK(moment_fit_cell(kCircle, box2(0, 0, 0.1, 0.1), 3, 4).rule.empty());
}

TEST_CASE("moment fitting reproduces its targets on circle cut cells") {
  for (const auto& c : mesh_cells(CartesianMesh(Box::unit(2), 8))) {
    if (classify_cell(kCircle, c.box) != CellClass::Cut) continue;
    const auto r = moment_fit_cell(kCircle, c.box, 3, 5);
    REQUIRE(r.exponents.size() == r.targets.size());
    for (std::size_t k = 0; k < r.exponents.size(); ++k) {
      const auto [i, j] = r.exponents[k];
      const double v = integrate(r.rule, [&](const Point& x) { return local_monomial(c.box, x, i, j); });
      CHECK(std::abs(v - r.targets[k]) <= 1e-10 * c.box.measure());
    }
  }
}

TEST_CASE("moment fitting rank deficiency") {
  const ImplicitField half = [](const Point& x) { return x[0] - 0.5; };
  CHECK_THROWS_AS(moment_fit_cell(half, Box::unit(2), 2, 2), RankDeficientError);
  CHECK_THROWS_AS(moment_fit_cell(half, Box::unit(2), 4, 2), std::invalid_argument);
}

TEST_CASE("monte carlo") {
  const ImplicitField neg = [](const Point&) { return -1.0; };
  const ImplicitField pos = [](const Point&) { return 1.0; };
  CHECK(monte_carlo_measure(neg, Box::unit(2), 1000, 1).value == 1.0);
  CHECK(monte_carlo_measure(pos, Box::unit(2), 1000, 1).value == 0.0);
  const auto e = monte_carlo_measure(kCircle, Box::unit(2), 1000000, 1);
  const double p = kCircleArea;
  CHECK(std::abs(e.value - kCircleArea) <= 4 * std::sqrt(p * (1 - p) / 1e6));
  CHECK(e.sigma() == Approx(std::sqrt(p * (1 - p) / 1e6)).epsilon(1e-2));
  const auto again = monte_carlo_measure(kCircle, Box::unit(2), 1000000, 1);
  CHECK(again.hits == e.hits);
  CHECK(monte_carlo_measure(kCircle, Box::unit(2), 1000000, 2).hits != e.hits);
}
