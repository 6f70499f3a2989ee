#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cutquad/geometry.hpp"
#include "cutquad/quadrature.hpp"

namespace cutquad {

// Quadtree / octree ---------------------------------------------------------

inline constexpr int kMaxQuadtreeDepth = 12;

/// Recursive bisection of cut cells. Inside cells get tensor_rule(order);
/// a cut cell at `depth` keeps tensor_rule(order) when its center is inside
/// and is dropped otherwise. Works in 2D and 3D.
QuadratureData quadtree_quadrature(const ImplicitField& phi, const Box& cell, int depth, int order,
                                   int samples_per_axis = kDefaultSamplesPerAxis);

// Linear reconstruction -----------------------------------------------------

using Polygon = std::vector<Point>;

/// Straight piece of the reconstructed interface with its unit outward normal.
struct InterfaceSegment {
  Point a{};
  Point b{};
  Point normal{};
  double length() const;
};

struct MarchingSquaresResult {
  /// Counter-clockwise polygons covering the inside part of the cell: one
  /// loop, or two for a saddle whose center sample lies outside.
  std::vector<Polygon> polygons;
  std::vector<InterfaceSegment> segments;
  /// Set when the cell was flagged cut but no corner sign change exists; the
  /// cell is then taken whole or empty by the sign at its center.
  bool fallback = false;
};

inline constexpr double kRootTolerance = 1e-13;
inline constexpr int kRootBisectionCap = 50;

/// Linear interface reconstruction on a single 2D cell. Edge roots come from
/// bisection on the sign change until |phi| <= 1e-13 or 50 halvings.
MarchingSquaresResult marching_squares_polygon(const ImplicitField& phi, const Box& cell);

/// Signed shoelace area (positive for counter-clockwise).
double shoelace_area(const Polygon& polygon);

/// Fan triangulation from the vertex centroid with a collapsed (Duffy) n x n
/// Gauss rule per triangle. Polygons with |area| < 1e-16 give an empty rule.
QuadratureData polygon_quadrature(const Polygon& polygon, int order);

// Moment fitting ------------------------------------------------------------

struct MomentFitResult {
  QuadratureData rule;
  /// Exponent pairs (i, j) of the fitted monomials, i + j <= degree, in local
  /// cell coordinates scaled to [-1, 1].
  std::vector<std::pair<int, int>> exponents;
  /// Target moments over the reconstructed inside region.
  std::vector<double> targets;
  /// max_k |sum_q w_q m_k(x_q) - target_k|.
  double residual = 0.0;
  bool fallback = false;
};

/// Raised when the moment system is rank deficient (e.g. degree >= order).
struct RankDeficientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Monomial x^i y^j evaluated in the cell's local [-1, 1]^2 coordinates.
double local_monomial(const Box& cell, const Point& x, int i, int j);

/// Fits weights at the order x order tensor Gauss nodes of `cell` so that all
/// local monomials of total degree <= degree integrate exactly over the
/// linearly reconstructed inside region. Weights may be negative.
/// Inside/outside cells short-circuit to the plain / empty rule.
MomentFitResult moment_fit_cell(const ImplicitField& phi, const Box& cell, int degree, int order);

inline constexpr double kMomentResidualTolerance = 1e-10;

// Monte Carlo ---------------------------------------------------------------

struct MonteCarloEstimate {
  double value = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  double box_measure = 0.0;

  /// Binomial standard deviation of `value`.
  double sigma() const;
};

/// box measure * (#samples with phi <= 0) / n, reproducible for a fixed seed
/// on every platform (mt19937_64 with a 53-bit mantissa mapping).
MonteCarloEstimate monte_carlo_measure(const ImplicitField& phi, const Box& box, std::uint64_t n,
                                       std::uint64_t seed, QuadratureData* hits = nullptr);

}  // namespace cutquad
