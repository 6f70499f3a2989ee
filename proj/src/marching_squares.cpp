#include <cmath>
#include <stdexcept>

#include "cutquad/cut_cell.hpp"

namespace cutquad {

double InterfaceSegment::length() const { return std::hypot(b[0] - a[0], b[1] - a[1]); }

namespace {

enum class VertexKind { Corner, Exit, Enter };

struct LoopVertex {
  Point x;
  VertexKind kind;
};

// Root of phi on [in, out] where phi(in) <= 0 < phi(out).
Point bisect_edge(const ImplicitField& phi, Point in, Point out) {
  if (std::abs(phi(in)) <= kRootTolerance) return in;
  if (std::abs(phi(out)) <= kRootTolerance) return out;
  Point mid{};
  for (int it = 0; it < kRootBisectionCap; ++it) {
    for (int a = 0; a < 2; ++a) mid[a] = 0.5 * (in[a] + out[a]);
    const double v = phi(mid);
    if (std::abs(v) <= kRootTolerance) return mid;
    (v <= 0.0 ? in : out) = mid;
  }
  for (int a = 0; a < 2; ++a) mid[a] = 0.5 * (in[a] + out[a]);
  return mid;
}

InterfaceSegment make_segment(const Point& a, const Point& b) {
  InterfaceSegment s{a, b, {}};
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len = std::hypot(dx, dy);
  if (len > 0.0) s.normal = {dy / len, -dx / len, 0.0};
  return s;
}

}  // namespace

MarchingSquaresResult marching_squares_polygon(const ImplicitField& phi, const Box& cell) {
  if (cell.dim != 2) throw std::invalid_argument("marching squares needs a 2D cell");
  const Point corners[4] = {{cell.lo[0], cell.lo[1], 0.0},
                            {cell.hi[0], cell.lo[1], 0.0},
                            {cell.hi[0], cell.hi[1], 0.0},
                            {cell.lo[0], cell.hi[1], 0.0}};
  bool inside[4];
  for (int k = 0; k < 4; ++k) inside[k] = phi(corners[k]) <= 0.0;

  // Walk the cell boundary counter-clockwise; roots on edge k follow corner k.
  std::vector<LoopVertex> walk;
  Point edge_root[4]{};
  int roots = 0;
  for (int k = 0; k < 4; ++k) {
    const int next = (k + 1) % 4;
    if (inside[k]) walk.push_back({corners[k], VertexKind::Corner});
    if (inside[k] != inside[next]) {
      edge_root[k] = inside[k] ? bisect_edge(phi, corners[k], corners[next])
                               : bisect_edge(phi, corners[next], corners[k]);
      walk.push_back({edge_root[k], inside[k] ? VertexKind::Exit : VertexKind::Enter});
      ++roots;
    }
  }

  MarchingSquaresResult result;
  if (roots == 0) {
    result.fallback = true;
    if (phi(cell.center()) <= 0.0) {
      result.polygons.push_back({corners[0], corners[1], corners[2], corners[3]});
    }
    return result;
  }

  const bool saddle = roots == 4;
  if (saddle && phi(cell.center()) > 0.0) {
    // Inside corners are separated: one triangle per inside corner.
    for (int k = 0; k < 4; ++k) {
      if (!inside[k]) continue;
      const Point& exit = edge_root[k];
      const Point& enter = edge_root[(k + 3) % 4];
      result.polygons.push_back({corners[k], exit, enter});
      result.segments.push_back(make_segment(exit, enter));
    }
    return result;
  }

  Polygon poly;
  for (std::size_t i = 0; i < walk.size(); ++i) {
    poly.push_back(walk[i].x);
    const auto& next = walk[(i + 1) % walk.size()];
    if (walk[i].kind == VertexKind::Exit && next.kind == VertexKind::Enter) {
      result.segments.push_back(make_segment(walk[i].x, next.x));
    }
  }
  result.polygons.push_back(std::move(poly));
  return result;
}

double shoelace_area(const Polygon& polygon) {
  double s = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& p = polygon[i];
    const auto& q = polygon[(i + 1) % polygon.size()];
    s += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * s;
}

QuadratureData polygon_quadrature(const Polygon& polygon, int order) {
  const auto& g = gauss_legendre(order);
  QuadratureData q;
  q.dim = 2;
  if (polygon.size() < 3 || std::abs(shoelace_area(polygon)) < 1e-16) return q;

  Point c{};
  for (const auto& v : polygon) {
    c[0] += v[0];
    c[1] += v[1];
  }
  c[0] /= static_cast<double>(polygon.size());
  c[1] /= static_cast<double>(polygon.size());

  for (std::size_t e = 0; e < polygon.size(); ++e) {
    const Point& b = polygon[e];
    const Point& d = polygon[(e + 1) % polygon.size()];
    const double ab[2] = {b[0] - c[0], b[1] - c[1]};
    const double bd[2] = {d[0] - b[0], d[1] - b[1]};
    const double twice_area = ab[0] * bd[1] - ab[1] * bd[0];
    if (twice_area == 0.0) continue;
    // x(s, t) = c + s (b - c) + s t (d - b) on [0,1]^2, Jacobian s * 2|T|.
    for (int i = 0; i < order; ++i) {
      const double s = 0.5 * (1.0 + g.nodes[i]);
      const double ws = 0.5 * g.weights[i];
      for (int j = 0; j < order; ++j) {
        const double t = 0.5 * (1.0 + g.nodes[j]);
        const double wt = 0.5 * g.weights[j];
        q.add({c[0] + s * ab[0] + s * t * bd[0], c[1] + s * ab[1] + s * t * bd[1], 0.0},
              ws * wt * s * twice_area);
      }
    }
  }
  return q;
}

}  // namespace cutquad
