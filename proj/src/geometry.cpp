#include "cutquad/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace cutquad {

Box Box::unit(int dim) {
  Box b;
  b.dim = dim;
  for (int a = 0; a < dim; ++a) b.hi[a] = 1.0;
  return b;
}

double Box::measure() const {
  double m = 1.0;
  for (int a = 0; a < dim; ++a) m *= width(a);
  return m;
}

double Box::diameter() const {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += width(a) * width(a);
  return std::sqrt(s);
}

Point Box::center() const {
  Point c{};
  for (int a = 0; a < dim; ++a) c[a] = 0.5 * (lo[a] + hi[a]);
  return c;
}

bool Box::contains(const Point& x) const {
  for (int a = 0; a < dim; ++a) {
    if (x[a] < lo[a] || x[a] > hi[a]) return false;
  }
  return true;
}

void Box::validate() const {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument(fmt::format("box dimension must be 2 or 3, got {}", dim));
  }
  for (int a = 0; a < dim; ++a) {
    if (!(lo[a] < hi[a]) || !std::isfinite(lo[a]) || !std::isfinite(hi[a])) {
      throw std::invalid_argument(
          fmt::format("box axis {} is empty or non-finite: [{}, {}]", a, lo[a], hi[a]));
    }
  }
}

std::string to_string(LevelSetKind kind) {
  switch (kind) {
    case LevelSetKind::Circle: return "circle";
    case LevelSetKind::Sphere: return "sphere";
    case LevelSetKind::Ellipse: return "ellipse";
  }
  return "unknown";
}

LevelSetKind level_set_kind_from_string(const std::string& name) {
  if (name == "circle") return LevelSetKind::Circle;
  if (name == "sphere") return LevelSetKind::Sphere;
  if (name == "ellipse") return LevelSetKind::Ellipse;
  throw std::invalid_argument("unknown level set kind '" + name + "'");
}

LevelSet::LevelSet(LevelSetKind kind, int dim, Point center, Point radii, Point shift)
    : kind_(kind), dim_(dim), center_(center), radii_(radii), shift_(shift) {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument(fmt::format("level set dimension must be 2 or 3, got {}", dim));
  }
  if (kind == LevelSetKind::Circle && dim != 2) {
    throw std::invalid_argument("circle level set must be two-dimensional");
  }
  if (kind == LevelSetKind::Sphere && dim != 3) {
    throw std::invalid_argument("sphere level set must be three-dimensional");
  }
  for (int a = 0; a < dim; ++a) {
    if (!(radii_[a] > 0.0) || !std::isfinite(radii_[a])) {
      throw std::invalid_argument(fmt::format("level set radius {} must be positive", radii_[a]));
    }
  }
  if (kind != LevelSetKind::Ellipse) {
    for (int a = 1; a < dim; ++a) {
      if (radii_[a] != radii_[0]) {
        throw std::invalid_argument("circle/sphere radii must all be equal");
      }
    }
  }
  for (int a = dim; a < 3; ++a) {
    center_[a] = 0.0;
    shift_[a] = 0.0;
    radii_[a] = 1.0;
  }
}

LevelSet LevelSet::circle(double cx, double cy, double radius) {
  return LevelSet(LevelSetKind::Circle, 2, {cx, cy, 0.0}, {radius, radius, 1.0});
}

LevelSet LevelSet::sphere(const Point& center, double radius) {
  return LevelSet(LevelSetKind::Sphere, 3, center, {radius, radius, radius});
}

LevelSet LevelSet::ellipse(double cx, double cy, double a, double b) {
  return LevelSet(LevelSetKind::Ellipse, 2, {cx, cy, 0.0}, {a, b, 1.0});
}

Point LevelSet::effective_center() const {
  Point c{};
  for (int a = 0; a < dim_; ++a) c[a] = center_[a] + shift_[a];
  return c;
}

Box LevelSet::bounding_box() const {
  Box b;
  b.dim = dim_;
  const Point c = effective_center();
  for (int a = 0; a < dim_; ++a) {
    b.lo[a] = c[a] - radii_[a];
    b.hi[a] = c[a] + radii_[a];
  }
  return b;
}

LevelSet LevelSet::translated(const Point& offset) const {
  LevelSet out = *this;
  for (int a = 0; a < dim_; ++a) out.shift_[a] += offset[a];
  return out;
}

double LevelSet::operator()(const Point& x) const {
  double s = 0.0;
  if (kind_ == LevelSetKind::Ellipse) {
    for (int a = 0; a < dim_; ++a) {
      const double d = (x[a] - center_[a] - shift_[a]) / radii_[a];
      s += d * d;
    }
    return std::sqrt(s) - 1.0;
  }
  for (int a = 0; a < dim_; ++a) {
    const double d = x[a] - center_[a] - shift_[a];
    s += d * d;
  }
  return std::sqrt(s) - radii_[0];
}

double LevelSet::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw std::invalid_argument(
        fmt::format("point has {} coordinates, level set is {}D", x.size(), dim_));
  }
  Point p{};
  for (int a = 0; a < dim_; ++a) p[a] = x[a];
  return (*this)(p);
}

CartesianMesh::CartesianMesh(Box b, int divisions_per_axis)
    : CartesianMesh(b, {divisions_per_axis, divisions_per_axis, b.dim == 3 ? divisions_per_axis : 1}) {}

CartesianMesh::CartesianMesh(Box b, std::array<int, 3> d) : bounds(b), divisions(d) {
  if (bounds.dim == 2) divisions[2] = 1;
  validate();
}

std::int64_t CartesianMesh::cell_count() const {
  std::int64_t n = 1;
  for (int a = 0; a < bounds.dim; ++a) n *= divisions[a];
  return n;
}

void CartesianMesh::validate() const {
  bounds.validate();
  for (int a = 0; a < bounds.dim; ++a) {
    if (divisions[a] < 1) {
      throw std::invalid_argument(fmt::format("mesh divisions must be >= 1, got {}", divisions[a]));
    }
  }
}

namespace {

double grid_coordinate(const Box& b, int axis, int i, int n) {
  if (i == n) return b.hi[axis];
  return b.lo[axis] + b.width(axis) * (static_cast<double>(i) / n);
}

}  // namespace

std::vector<MeshCell> mesh_cells(const CartesianMesh& mesh) {
  const int dim = mesh.dim();
  const auto& n = mesh.divisions;
  const int nz = dim == 3 ? n[2] : 1;
  std::vector<MeshCell> cells;
  cells.reserve(static_cast<std::size_t>(mesh.cell_count()));
  std::int64_t linear = 0;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        MeshCell c;
        c.box.dim = dim;
        c.index = {i, j, dim == 3 ? k : 0};
        for (int a = 0; a < dim; ++a) {
          c.box.lo[a] = grid_coordinate(mesh.bounds, a, c.index[a], n[a]);
          c.box.hi[a] = grid_coordinate(mesh.bounds, a, c.index[a] + 1, n[a]);
        }
        c.linear_index = linear++;
        cells.push_back(c);
      }
    }
  }
  return cells;
}

}  // namespace cutquad
