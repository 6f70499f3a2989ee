#include "cutquad/nurbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace cutquad {

namespace {

// Non-zero B-spline basis functions of degree q on knot span s
// (Cox-de Boor triangle, N_{s-q..s}).
std::vector<double> basis_functions(const std::vector<double>& knots, int s, int q, double t) {
  std::vector<double> n(q + 1, 0.0), left(q + 1, 0.0), right(q + 1, 0.0);
  n[0] = 1.0;
  for (int j = 1; j <= q; ++j) {
    left[j] = t - knots[s + 1 - j];
    right[j] = knots[s + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = n[r] / (right[r + 1] + left[j - r]);
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  return n;
}

}  // namespace

NurbsCurve::NurbsCurve(int degree, std::vector<double> knots, std::vector<Point> control_points,
                       std::vector<double> weights)
    : degree_(degree),
      knots_(std::move(knots)),
      control_points_(std::move(control_points)),
      weights_(std::move(weights)) {
  if (degree_ < 0) throw std::invalid_argument("NURBS degree must be non-negative");
  const auto ncp = control_points_.size();
  if (ncp == 0) throw std::invalid_argument("NURBS curve needs at least one control point");
  if (knots_.size() != ncp + degree_ + 1) {
    throw std::invalid_argument(fmt::format(
        "NURBS knot count {} != control points {} + degree {} + 1", knots_.size(), ncp, degree_));
  }
  if (weights_.size() != ncp) {
    throw std::invalid_argument(
        fmt::format("NURBS weight count {} != control point count {}", weights_.size(), ncp));
  }
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("NURBS weights must be positive");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (knots_[i] < knots_[i - 1]) throw std::invalid_argument("NURBS knots must be non-decreasing");
  }
  for (int i = 1; i <= degree_; ++i) {
    if (knots_[i] != knots_[0] || knots_[knots_.size() - 1 - i] != knots_.back()) {
      throw std::invalid_argument("NURBS knot vector must be clamped (end multiplicity degree+1)");
    }
  }
  if (!(knots_.front() < knots_.back())) {
    throw std::invalid_argument("NURBS curve has a zero-length parameter range");
  }
}

std::vector<std::pair<double, double>> NurbsCurve::spans() const {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    if (knots_[i + 1] > knots_[i]) out.emplace_back(knots_[i], knots_[i + 1]);
  }
  return out;
}

void NurbsCurve::check_parameter(double t) const {
  if (knots_.empty()) throw std::invalid_argument("NURBS curve is empty");
  if (!(t >= knots_.front() && t <= knots_.back())) {
    throw std::invalid_argument(
        fmt::format("parameter {} outside knot range [{}, {}]", t, knots_.front(), knots_.back()));
  }
}

int NurbsCurve::find_span(double t) const {
  const int n = static_cast<int>(control_points_.size()) - 1;
  if (t >= knots_[n + 1]) {
    // Last non-degenerate span for the right end point.
    int s = n;
    while (s > degree_ && knots_[s] == knots_[s + 1]) --s;
    return s;
  }
  int lo = degree_, hi = n + 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (t < knots_[mid]) hi = mid; else lo = mid;
  }
  return lo;
}

std::vector<double> NurbsCurve::rational_basis(double t, int& first) const {
  check_parameter(t);
  const int s = find_span(t);
  auto n = basis_functions(knots_, s, degree_, t);
  first = s - degree_;
  double w = 0.0;
  for (int j = 0; j <= degree_; ++j) {
    n[j] *= weights_[first + j];
    w += n[j];
  }
  for (double& v : n) v /= w;
  return n;
}

Point NurbsCurve::eval(double t) const {
  int first = 0;
  const auto r = rational_basis(t, first);
  Point x{};
  for (int j = 0; j <= degree_; ++j) {
    x[0] += r[j] * control_points_[first + j][0];
    x[1] += r[j] * control_points_[first + j][1];
  }
  return x;
}

Point NurbsCurve::derivative(double t) const {
  check_parameter(t);
  if (degree_ == 0) return Point{};
  const int p = degree_;
  const int s = find_span(t);
  const auto n = basis_functions(knots_, s, p, t);
  const auto lower = basis_functions(knots_, s, p - 1, t);

  // dN_{s-p+j,p} from the degree p-1 functions N_{s-p+1..s, p-1}.
  std::vector<double> dn(p + 1, 0.0);
  for (int j = 0; j <= p; ++j) {
    const int i = s - p + j;
    double d = 0.0;
    if (j >= 1) {
      const double den = knots_[i + p] - knots_[i];
      if (den > 0.0) d += lower[j - 1] / den;
    }
    if (j <= p - 1) {
      const double den = knots_[i + p + 1] - knots_[i + 1];
      if (den > 0.0) d -= lower[j] / den;
    }
    dn[j] = p * d;
  }

  double w = 0.0, dw = 0.0;
  Point a{}, da{};
  for (int j = 0; j <= p; ++j) {
    const int i = s - p + j;
    const double wi = weights_[i];
    w += n[j] * wi;
    dw += dn[j] * wi;
    for (int c = 0; c < 2; ++c) {
      a[c] += n[j] * wi * control_points_[i][c];
      da[c] += dn[j] * wi * control_points_[i][c];
    }
  }
  Point v{};
  for (int c = 0; c < 2; ++c) v[c] = (da[c] - dw * (a[c] / w)) / w;
  return v;
}

NurbsCurve NurbsCurve::translated(const Point& offset) const {
  NurbsCurve out = *this;
  for (auto& p : out.control_points_) {
    p[0] += offset[0];
    p[1] += offset[1];
  }
  return out;
}

NurbsCurve NurbsCurve::reversed() const {
  NurbsCurve out = *this;
  std::reverse(out.control_points_.begin(), out.control_points_.end());
  std::reverse(out.weights_.begin(), out.weights_.end());
  const double a = knots_.front(), b = knots_.back();
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    out.knots_[i] = a + b - knots_[knots_.size() - 1 - i];
  }
  return out;
}

NurbsLoop::NurbsLoop(std::vector<NurbsCurve> curves) : curves_(std::move(curves)) {
  if (curves_.empty()) throw std::invalid_argument("NURBS loop needs at least one curve");
  const double gap = closure_gap();
  if (gap > kClosureTolerance) {
    throw std::invalid_argument(fmt::format("NURBS loop is not closed (gap {:.3g})", gap));
  }
  if (!(polyline_signed_area() > 0.0)) {
    throw std::invalid_argument("NURBS loop must be oriented counter-clockwise");
  }
}

std::vector<Point> NurbsLoop::sample(int samples_per_curve) const {
  std::vector<Point> out;
  out.reserve(curves_.size() * samples_per_curve);
  for (const auto& c : curves_) {
    const double a = c.t_begin(), b = c.t_end();
    for (int k = 0; k < samples_per_curve; ++k) {
      out.push_back(c.eval(a + (b - a) * (static_cast<double>(k) / samples_per_curve)));
    }
  }
  return out;
}

double NurbsLoop::polyline_signed_area(int samples_per_curve) const {
  const auto pts = sample(samples_per_curve);
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& q = pts[(i + 1) % pts.size()];
    s += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * s;
}

double NurbsLoop::closure_gap() const {
  double gap = 0.0;
  for (std::size_t i = 0; i < curves_.size(); ++i) {
    const Point e = curves_[i].eval(curves_[i].t_end());
    const Point s = curves_[(i + 1) % curves_.size()].eval(curves_[(i + 1) % curves_.size()].t_begin());
    gap = std::max(gap, std::hypot(e[0] - s[0], e[1] - s[1]));
  }
  return gap;
}

NurbsLoop NurbsLoop::translated(const Point& offset) const {
  NurbsLoop out = *this;
  for (auto& c : out.curves_) c = c.translated(offset);
  return out;
}

NurbsLoop NurbsLoop::reversed() const {
  NurbsLoop out;
  for (auto it = curves_.rbegin(); it != curves_.rend(); ++it) out.curves_.push_back(it->reversed());
  return out;
}

NurbsCurve make_ellipse_curve(double cx, double cy, double rx, double ry) {
  const double s = std::sqrt(2.0) / 2.0;
  // Unit-circle control net, counter-clockwise from (1, 0).
  const double net[9][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0},
                            {-1, -1}, {0, -1}, {1, -1}, {1, 0}};
  std::vector<Point> cps;
  std::vector<double> weights;
  for (int i = 0; i < 9; ++i) {
    cps.push_back({cx + rx * net[i][0], cy + ry * net[i][1], 0.0});
    weights.push_back(i % 2 == 0 ? 1.0 : s);
  }
  std::vector<double> knots = {0.0, 0.0, 0.0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1.0, 1.0, 1.0};
  return NurbsCurve(2, std::move(knots), std::move(cps), std::move(weights));
}

NurbsLoop make_polygon_loop(const std::vector<Point>& vertices) {
  std::vector<NurbsCurve> curves;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    curves.emplace_back(1, std::vector<double>{0.0, 0.0, 1.0, 1.0},
                        std::vector<Point>{vertices[i], vertices[(i + 1) % vertices.size()]},
                        std::vector<double>{1.0, 1.0});
  }
  return NurbsLoop(std::move(curves));
}

}  // namespace cutquad
