#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "cutquad/cut_cell.hpp"
#include "cutquad/integrator.hpp"

namespace cutquad {

namespace {

// Reads integer parameters, rejecting unknown keys and malformed values.
class ParameterReader {
 public:
  ParameterReader(std::string owner, const ParameterMap& params)
      : owner_(std::move(owner)), params_(params) {}

  long long integer(const std::string& key, long long fallback, long long lo, long long hi) {
    seen_.push_back(key);
    auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(it->second, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != it->second.size()) {
      throw std::invalid_argument(
          fmt::format("{}.{}: '{}' is not an integer", owner_, key, it->second));
    }
    if (v < lo || v > hi) {
      throw std::invalid_argument(fmt::format("{}.{} must be in {}..{}, got {}", owner_, key, lo, hi, v));
    }
    return v;
  }

  void finish() const {
    for (const auto& [k, v] : params_) {
      if (std::find(seen_.begin(), seen_.end(), k) == seen_.end()) {
        throw std::invalid_argument(fmt::format("{} has no parameter '{}'", owner_, k));
      }
    }
  }

 private:
  std::string owner_;
  const ParameterMap& params_;
  std::vector<std::string> seen_;
};

void require_mesh_covers_interface(const TestCase& tc, const CartesianMesh& mesh) {
  const Box bb = tc.level_set.bounding_box();
  for (int a = 0; a < tc.dim; ++a) {
    if (bb.lo[a] < mesh.bounds.lo[a] || bb.hi[a] > mesh.bounds.hi[a]) {
      throw std::invalid_argument("background mesh does not cover the interface");
    }
  }
}

}  // namespace

// Quadtree ------------------------------------------------------------------

QuadtreeIntegrator::QuadtreeIntegrator(const ParameterMap& params) {
  ParameterReader p("quadtree", params);
  depth_ = static_cast<int>(p.integer("depth", 6, 0, kMaxQuadtreeDepth));
  depth3d_ = static_cast<int>(p.integer("depth3d", 2, 0, kMaxQuadtreeDepth));
  samples_ = static_cast<int>(p.integer("samples", kDefaultSamplesPerAxis, 2, 64));
  p.finish();
  desc_.name = "quadtree";
  desc_.interface_type = InterfaceType::Implicit;
  desc_.supported_dims = {2, 3};
  desc_.capabilities = {Operation::Area2D, Operation::Volume3D};
  desc_.parameters = {{"depth", std::to_string(depth_)},
                      {"depth3d", std::to_string(depth3d_)},
                      {"samples", std::to_string(samples_)}};
}

Integrator::Estimate QuadtreeIntegrator::evaluate(Operation, const TestCase& tc,
                                                  const CartesianMesh& mesh, int order) const {
  require_mesh_covers_interface(tc, mesh);
  const ImplicitField phi = tc.level_set;
  const int depth = depth_for(tc.dim);
  Estimate e;
  e.quadrature.dim = tc.dim;
  for (const auto& cell : mesh_cells(mesh)) {
    e.quadrature.append(quadtree_quadrature(phi, cell.box, depth, order, samples_), cell.linear_index);
  }
  e.value = rule_total(e.quadrature);
  return e;
}

// Linear reconstruction -------------------------------------------------------

LinearReconstructionIntegrator::LinearReconstructionIntegrator(const ParameterMap& params) {
  ParameterReader p("linear", params);
  samples_ = static_cast<int>(p.integer("samples", kDefaultSamplesPerAxis, 2, 64));
  p.finish();
  desc_.name = "linear";
  desc_.interface_type = InterfaceType::Implicit;
  desc_.supported_dims = {2};
  desc_.capabilities = {Operation::Area2D, Operation::InterfaceCurveLength, Operation::AreaViaFlux2D};
  desc_.parameters = {{"samples", std::to_string(samples_)}};
}

Integrator::Estimate LinearReconstructionIntegrator::evaluate(Operation op, const TestCase& tc,
                                                              const CartesianMesh& mesh,
                                                              int order) const {
  require_mesh_covers_interface(tc, mesh);
  const ImplicitField phi = tc.level_set;
  const auto& g = gauss_legendre(order);
  Estimate e;
  e.quadrature.dim = 2;
  for (const auto& cell : mesh_cells(mesh)) {
    const CellClass cls = classify_cell(phi, cell.box, samples_);
    if (cls == CellClass::Outside) continue;
    if (op == Operation::Area2D) {
      if (cls == CellClass::Inside) {
        e.quadrature.append(tensor_rule(order, cell.box), cell.linear_index);
        continue;
      }
      for (const auto& poly : marching_squares_polygon(phi, cell.box).polygons) {
        e.quadrature.append(polygon_quadrature(poly, order), cell.linear_index);
      }
      continue;
    }
    if (cls != CellClass::Cut) continue;
    for (const auto& seg : marching_squares_polygon(phi, cell.box).segments) {
      const double half = 0.5 * seg.length();
      for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const double t = 0.5 * (1.0 + g.nodes[k]);
        const Point x{seg.a[0] + t * (seg.b[0] - seg.a[0]), seg.a[1] + t * (seg.b[1] - seg.a[1]), 0.0};
        e.quadrature.add(x, g.weights[k] * half, seg.normal, cell.linear_index);
      }
    }
  }
  if (op == Operation::AreaViaFlux2D) {
    // F = (x, 0): div F = 1.
    double s = 0.0;
    for (std::size_t i = 0; i < e.quadrature.size(); ++i) {
      s += e.quadrature.weights[i] * e.quadrature.points[i][0] * e.quadrature.normals[i][0];
    }
    e.value = s;
  } else {
    e.value = rule_total(e.quadrature);
  }
  return e;
}

// Moment fitting ---------------------------------------------------------------

MomentFittingIntegrator::MomentFittingIntegrator(const ParameterMap& params) {
  ParameterReader p("momentfit", params);
  degree_ = static_cast<int>(p.integer("degree", 3, 0, 63));
  p.finish();
  desc_.name = "momentfit";
  desc_.interface_type = InterfaceType::Implicit;
  desc_.supported_dims = {2};
  desc_.capabilities = {Operation::Area2D};
  desc_.parameters = {{"degree", std::to_string(degree_)}};
}

Integrator::Estimate MomentFittingIntegrator::evaluate(Operation, const TestCase& tc,
                                                       const CartesianMesh& mesh, int order) const {
  require_mesh_covers_interface(tc, mesh);
  gauss_legendre(order);
  const ImplicitField phi = tc.level_set;
  const int degree = std::min(degree_, order - 1);
  Estimate e;
  e.quadrature.dim = 2;
  for (const auto& cell : mesh_cells(mesh)) {
    const CellClass cls = classify_cell(phi, cell.box);
    if (cls == CellClass::Outside) continue;
    if (cls == CellClass::Inside) {
      e.quadrature.append(tensor_rule(order, cell.box), cell.linear_index);
    } else {
      e.quadrature.append(moment_fit_cell(phi, cell.box, degree, order).rule, cell.linear_index);
    }
  }
  e.value = rule_total(e.quadrature);
  return e;
}

// Parametric flux -----------------------------------------------------------------

QuadratureData parametric_interface_rule(const NurbsLoop& loop, int order) {
  const auto& g = gauss_legendre(order);
  QuadratureData q;
  q.dim = 2;
  for (const auto& curve : loop.curves()) {
    for (const auto& [a, b] : curve.spans()) {
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const double t = mid + half * g.nodes[k];
        const Point d = curve.derivative(t);
        const double speed = std::hypot(d[0], d[1]);
        const Point n = speed > 0.0 ? Point{d[1] / speed, -d[0] / speed, 0.0} : Point{};
        q.add(curve.eval(t), g.weights[k] * half * speed, n, kNoCell);
      }
    }
  }
  return q;
}

namespace {

// Gauss sum over every knot span of f(x(t), x'(t)) dt.
template <typename F>
double loop_integral(const NurbsLoop& loop, int order, F&& f) {
  const auto& g = gauss_legendre(order);
  double total = 0.0;
  for (const auto& curve : loop.curves()) {
    for (const auto& [a, b] : curve.spans()) {
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      double span = 0.0;
      for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const double t = mid + half * g.nodes[k];
        span += g.weights[k] * f(curve.eval(t), curve.derivative(t));
      }
      total += half * span;
    }
  }
  return total;
}

}  // namespace

double flux_area_parametric(const NurbsLoop& loop, int order, QuadratureData* rule) {
  if (rule) *rule = parametric_interface_rule(loop, order);
  return loop_integral(loop, order, [](const Point& x, const Point& d) { return x[0] * d[1]; });
}

double symmetric_flux_area_parametric(const NurbsLoop& loop, int order) {
  return 0.5 * loop_integral(loop, order,
                             [](const Point& x, const Point& d) { return x[0] * d[1] - x[1] * d[0]; });
}

double arc_length_parametric(const NurbsLoop& loop, int order) {
  return loop_integral(loop, order, [](const Point&, const Point& d) { return std::hypot(d[0], d[1]); });
}

ParametricFluxIntegrator::ParametricFluxIntegrator(const ParameterMap& params) {
  ParameterReader p("flux", params);
  min_order_ = static_cast<int>(p.integer("min_order", 20, 1, 64));
  p.finish();
  desc_.name = "flux";
  desc_.interface_type = InterfaceType::Parametric;
  desc_.supported_dims = {2};
  desc_.capabilities = {Operation::Area2D, Operation::InterfaceCurveLength, Operation::AreaViaFlux2D};
  desc_.parameters = {{"min_order", std::to_string(min_order_)}};
}

int ParametricFluxIntegrator::effective_order(int order) const { return std::max(order, min_order_); }

Integrator::Estimate ParametricFluxIntegrator::evaluate(Operation op, const TestCase& tc,
                                                        const CartesianMesh&, int order) const {
  const NurbsLoop& loop = *tc.loop;
  const int n = effective_order(order);
  Estimate e;
  e.quadrature = parametric_interface_rule(loop, n);
  switch (op) {
    case Operation::Area2D: e.value = symmetric_flux_area_parametric(loop, n); break;
    case Operation::AreaViaFlux2D: e.value = flux_area_parametric(loop, n); break;
    case Operation::InterfaceCurveLength: e.value = arc_length_parametric(loop, n); break;
    default: throw std::logic_error("flux integrator asked for an undeclared operation");
  }
  return e;
}

// Monte Carlo -------------------------------------------------------------------

MonteCarloIntegrator::MonteCarloIntegrator(const ParameterMap& params) {
  ParameterReader p("montecarlo", params);
  samples_ = static_cast<std::uint64_t>(p.integer("samples", 1000000, 1, 1000000000000LL));
  seed_ = static_cast<std::uint64_t>(p.integer("seed", 42, 0, 9007199254740991LL));
  p.finish();
  desc_.name = "montecarlo";
  desc_.interface_type = InterfaceType::Implicit;
  desc_.supported_dims = {2, 3};
  desc_.capabilities = {Operation::Area2D, Operation::Volume3D};
  desc_.parameters = {{"samples", std::to_string(samples_)}, {"seed", std::to_string(seed_)}};
}

Integrator::Estimate MonteCarloIntegrator::evaluate(Operation, const TestCase& tc,
                                                    const CartesianMesh&, int) const {
  Estimate e;
  e.value = monte_carlo_measure(tc.level_set, tc.domain, samples_, seed_, &e.quadrature).value;
  return e;
}

}  // namespace cutquad
