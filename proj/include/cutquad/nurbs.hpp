#pragma once

#include <utility>
#include <vector>

#include "cutquad/geometry.hpp"

namespace cutquad {

/// Clamped planar NURBS curve. Control points use the x/y components of Point.
class NurbsCurve {
 public:
  NurbsCurve() = default;

  /// Validates knot/weight counts, monotone knots, clamped ends, positive
  /// weights and a non-empty parameter range; throws std::invalid_argument.
  NurbsCurve(int degree, std::vector<double> knots, std::vector<Point> control_points,
             std::vector<double> weights);

  int degree() const { return degree_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<Point>& control_points() const { return control_points_; }
  const std::vector<double>& weights() const { return weights_; }

  double t_begin() const { return knots_.front(); }
  double t_end() const { return knots_.back(); }

  /// Knot intervals of non-zero length, in parameter order.
  std::vector<std::pair<double, double>> spans() const;

  /// x(t) = sum N_i(t) w_i P_i / sum N_i(t) w_i.
  Point eval(double t) const;

  /// dx/dt of the rational map.
  Point derivative(double t) const;

  /// Rational basis values R_i(t) = N_i w_i / sum_j N_j w_j, indexed from
  /// `first` (the index of the first non-zero function).
  std::vector<double> rational_basis(double t, int& first) const;

  NurbsCurve translated(const Point& offset) const;
  NurbsCurve reversed() const;

  friend bool operator==(const NurbsCurve&, const NurbsCurve&) = default;

 private:
  int find_span(double t) const;
  void check_parameter(double t) const;

  int degree_ = 0;
  std::vector<double> knots_;
  std::vector<Point> control_points_;
  std::vector<double> weights_;
};

/// Closed loop of curves; curve i ends where curve i+1 starts (cyclically).
class NurbsLoop {
 public:
  static constexpr double kClosureTolerance = 1e-12;

  NurbsLoop() = default;

  /// Throws std::invalid_argument if the loop is empty, not closed, or not
  /// counter-clockwise.
  explicit NurbsLoop(std::vector<NurbsCurve> curves);

  const std::vector<NurbsCurve>& curves() const { return curves_; }

  /// `samples_per_curve` points per curve, uniform in parameter; the end
  /// point of each curve is left to the next curve.
  std::vector<Point> sample(int samples_per_curve) const;

  /// Shoelace area of the closed polyline through sample(samples_per_curve).
  double polyline_signed_area(int samples_per_curve = 256) const;

  /// Largest gap between consecutive curve end/start points.
  double closure_gap() const;

  NurbsLoop translated(const Point& offset) const;

  /// Reverses the orientation. Skips the orientation check so that
  /// clockwise loops can be built for sign tests.
  NurbsLoop reversed() const;

  friend bool operator==(const NurbsLoop&, const NurbsLoop&) = default;

 private:
  std::vector<NurbsCurve> curves_;
};

/// Standard rational quadratic circle: 9 control points, 4 arcs, mid-arc
/// weights sqrt(2)/2, counter-clockwise, starting at (cx + rx, cy).
/// With rx != ry the same net gives the axis-aligned ellipse.
NurbsCurve make_ellipse_curve(double cx, double cy, double rx, double ry);

/// Closed counter-clockwise polygon as a loop of degree-1 curves.
NurbsLoop make_polygon_loop(const std::vector<Point>& vertices);

}  // namespace cutquad
