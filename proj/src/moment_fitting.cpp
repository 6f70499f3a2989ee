#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "cutquad/cut_cell.hpp"

namespace cutquad {

double local_monomial(const Box& cell, const Point& x, int i, int j) {
  const double xi = (2.0 * x[0] - cell.lo[0] - cell.hi[0]) / cell.width(0);
  const double eta = (2.0 * x[1] - cell.lo[1] - cell.hi[1]) / cell.width(1);
  return std::pow(xi, i) * std::pow(eta, j);
}

namespace {

// Integral of the local monomial xi^i eta^j over a counter-clockwise polygon,
// as the boundary integral of G dy with dG/dx = xi^i eta^j.
double polygon_moment(const Box& cell, const Polygon& poly, int i, int j) {
  const auto& g = gauss_legendre(std::max(1, (i + j + 1) / 2 + 1));
  const double hx = cell.width(0);
  double total = 0.0;
  for (std::size_t e = 0; e < poly.size(); ++e) {
    const Point& p = poly[e];
    const Point& q = poly[(e + 1) % poly.size()];
    const double dy = q[1] - p[1];
    if (dy == 0.0) continue;
    double edge = 0.0;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      const double t = 0.5 * (1.0 + g.nodes[k]);
      const Point x{p[0] + t * (q[0] - p[0]), p[1] + t * dy, 0.0};
      edge += 0.5 * g.weights[k] * 0.5 * hx * local_monomial(cell, x, i + 1, j) / (i + 1);
    }
    total += edge * dy;
  }
  return total;
}

}  // namespace

MomentFitResult moment_fit_cell(const ImplicitField& phi, const Box& cell, int degree, int order) {
  if (cell.dim != 2) throw std::invalid_argument("moment fitting is implemented for 2D cells");
  if (degree < 0 || degree > order) {
    throw std::invalid_argument(
        fmt::format("moment-fit degree must be in 0..order ({}), got {}", order, degree));
  }
  MomentFitResult result;
  for (int d = 0; d <= degree; ++d) {
    for (int j = 0; j <= d; ++j) result.exponents.emplace_back(d - j, j);
  }

  const CellClass cls = classify_cell(phi, cell);
  if (cls == CellClass::Outside) {
    result.rule.dim = 2;
    return result;
  }
  if (cls == CellClass::Inside) {
    result.rule = tensor_rule(order, cell);
    return result;
  }

  const auto ms = marching_squares_polygon(phi, cell);
  result.fallback = ms.fallback;
  if (ms.polygons.empty()) {
    result.rule.dim = 2;
    return result;
  }

  const QuadratureData nodes = tensor_rule(order, cell);
  const auto m = static_cast<Eigen::Index>(result.exponents.size());
  const auto n = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd a(m, n);
  Eigen::VectorXd b(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto [i, j] = result.exponents[k];
    for (Eigen::Index q = 0; q < n; ++q) a(k, q) = local_monomial(cell, nodes.points[q], i, j);
    double target = 0.0;
    for (const auto& poly : ms.polygons) target += polygon_moment(cell, poly, i, j);
    b(k) = target;
    result.targets.push_back(target);
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  if (cod.rank() < m) {
    throw RankDeficientError(fmt::format(
        "moment system rank {} < {} monomials (degree {}, order {})", cod.rank(), m, degree, order));
  }
  const Eigen::VectorXd w = cod.solve(b);
  result.residual = (a * w - b).cwiseAbs().maxCoeff();
  if (result.residual > kMomentResidualTolerance * cell.measure()) {
    throw std::runtime_error(fmt::format("moment-fit residual {:.3g} exceeds tolerance", result.residual));
  }

  result.rule.dim = 2;
  for (Eigen::Index q = 0; q < n; ++q) result.rule.add(nodes.points[q], w(q));
  return result;
}

}  // namespace cutquad
