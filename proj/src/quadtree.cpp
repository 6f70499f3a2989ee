#include <stdexcept>

#include <fmt/format.h>

#include "cutquad/cut_cell.hpp"

namespace cutquad {

namespace {

void refine(const ImplicitField& phi, const Box& box, int level, int depth, int order, int samples,
            QuadratureData& out) {
  const CellClass c = classify_cell(phi, box, samples);
  if (c == CellClass::Outside) return;
  if (c == CellClass::Inside) {
    out.append(tensor_rule(order, box));
    return;
  }
  if (level == depth) {
    if (phi(box.center()) <= 0.0) out.append(tensor_rule(order, box));
    return;
  }
  const Point mid = box.center();
  const int children = 1 << box.dim;
  for (int child = 0; child < children; ++child) {
    Box sub = box;
    for (int a = 0; a < box.dim; ++a) {
      if (child & (1 << a)) {
        sub.lo[a] = mid[a];
      } else {
        sub.hi[a] = mid[a];
      }
    }
    refine(phi, sub, level + 1, depth, order, samples, out);
  }
}

}  // namespace

QuadratureData quadtree_quadrature(const ImplicitField& phi, const Box& cell, int depth, int order,
                                   int samples_per_axis) {
  if (depth < 0 || depth > kMaxQuadtreeDepth) {
    throw std::invalid_argument(
        fmt::format("quadtree depth must be in 0..{}, got {}", kMaxQuadtreeDepth, depth));
  }
  gauss_legendre(order);  // validates the order
  QuadratureData out;
  out.dim = cell.dim;
  refine(phi, cell, 0, depth, order, samples_per_axis, out);
  return out;
}

}  // namespace cutquad
