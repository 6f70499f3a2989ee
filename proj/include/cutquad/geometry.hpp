#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cutquad {

/// Coordinates in up to three dimensions. Unused trailing components are zero;
/// the active dimension is carried by the owning object (box, level set, mesh).
using Point = std::array<double, 3>;

/// Axis-aligned box [lo, hi] in `dim` dimensions.
struct Box {
  int dim = 2;
  Point lo{};
  Point hi{};

  static Box unit(int dim);

  double width(int axis) const { return hi[axis] - lo[axis]; }
  double measure() const;
  double diameter() const;
  Point center() const;
  bool contains(const Point& x) const;

  /// Throws std::invalid_argument unless dim in {2,3} and lo < hi per axis.
  void validate() const;

  friend bool operator==(const Box&, const Box&) = default;
};

enum class LevelSetKind { Circle, Sphere, Ellipse };

std::string to_string(LevelSetKind kind);
LevelSetKind level_set_kind_from_string(const std::string& name);

/// Implicit interface: the enclosed domain is {phi <= 0}.
///
/// Circles and spheres evaluate the exact signed distance. Ellipses evaluate
/// sqrt(sum(((x - c - s) / r)^2)) - 1, which has the correct sign and zero set
/// but is not a distance.
class LevelSet {
 public:
  LevelSet() = default;
  LevelSet(LevelSetKind kind, int dim, Point center, Point radii, Point shift = {});

  static LevelSet circle(double cx, double cy, double radius);
  static LevelSet sphere(const Point& center, double radius);
  static LevelSet ellipse(double cx, double cy, double a, double b);

  LevelSetKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Point& center() const { return center_; }
  const Point& radii() const { return radii_; }
  const Point& shift() const { return shift_; }

  /// Center after applying the shift.
  Point effective_center() const;

  /// Axis-aligned bounding box of the enclosed domain.
  Box bounding_box() const;

  LevelSet translated(const Point& offset) const;

  /// Fast path; components beyond dim() are ignored.
  double operator()(const Point& x) const;

  /// Checked evaluation: throws std::invalid_argument unless x.size() == dim().
  double eval(std::span<const double> x) const;

  friend bool operator==(const LevelSet&, const LevelSet&) = default;

 private:
  LevelSetKind kind_ = LevelSetKind::Circle;
  int dim_ = 2;
  Point center_{};
  Point radii_{1.0, 1.0, 1.0};
  Point shift_{};
};

/// Uniform Cartesian background mesh.
struct CartesianMesh {
  Box bounds;
  std::array<int, 3> divisions{1, 1, 1};

  CartesianMesh() = default;
  CartesianMesh(Box bounds, int divisions_per_axis);
  CartesianMesh(Box bounds, std::array<int, 3> divisions);

  int dim() const { return bounds.dim; }
  std::int64_t cell_count() const;
  double cell_width(int axis) const { return bounds.width(axis) / divisions[axis]; }

  void validate() const;

  friend bool operator==(const CartesianMesh&, const CartesianMesh&) = default;
};

struct MeshCell {
  Box box;
  std::array<int, 3> index{};
  std::int64_t linear_index = 0;
};

/// Row-major enumeration (x fastest). Cells are conceptually half-open; the
/// boxes returned share faces with their neighbours and the last cell on
/// every axis ends exactly at bounds.hi.
std::vector<MeshCell> mesh_cells(const CartesianMesh& mesh);

}  // namespace cutquad
