#include "cutquad/quadrature.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace cutquad {

void QuadratureData::append(const QuadratureData& other, std::int64_t cell) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
  if (cell == kNoCell) {
    cell_index.insert(cell_index.end(), other.cell_index.begin(), other.cell_index.end());
  } else {
    cell_index.insert(cell_index.end(), other.size(), cell);
  }
  normals.insert(normals.end(), other.normals.begin(), other.normals.end());
}

void QuadratureData::validate() const {
  if (points.size() != weights.size() || cell_index.size() != weights.size()) {
    throw std::logic_error("quadrature data arrays differ in length");
  }
  if (!normals.empty() && normals.size() != weights.size()) {
    throw std::logic_error("quadrature normals differ in length");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw std::logic_error("quadrature weight is not finite");
  }
}

namespace {

// P_n(x) and P_{n-1}(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double prev = 1.0, cur = x;
  for (int k = 2; k <= n; ++k) {
    const double next = ((2.0 * k - 1.0) * x * cur - (k - 1.0) * prev) / k;
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

double legendre_derivative(int n, double x) {
  const auto [pn, pnm1] = legendre(n, x);
  return n * (x * pn - pnm1) / (x * x - 1.0);
}

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const double dx = legendre(n, x).first / legendre_derivative(n, x);
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    const double dp = legendre_derivative(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 64) {
    throw std::invalid_argument(fmt::format("Gauss-Legendre order must be in 1..64, got {}", n));
  }
  static const std::array<GaussRule, 64> rules = [] {
    std::array<GaussRule, 64> r;
    for (int k = 1; k <= 64; ++k) r[k - 1] = compute_gauss_legendre(k);
    return r;
  }();
  return rules[n - 1];
}

QuadratureData tensor_rule(int n, const Box& box) {
  const auto& g = gauss_legendre(n);
  QuadratureData q;
  q.dim = box.dim;
  std::array<double, 3> half{}, mid{};
  for (int a = 0; a < box.dim; ++a) {
    half[a] = 0.5 * box.width(a);
    mid[a] = 0.5 * (box.lo[a] + box.hi[a]);
  }
  const int nz = box.dim == 3 ? n : 1;
  const std::size_t count = static_cast<std::size_t>(n) * n * nz;
  q.points.reserve(count);
  q.weights.reserve(count);
  q.cell_index.reserve(count);
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        Point x{mid[0] + half[0] * g.nodes[i], mid[1] + half[1] * g.nodes[j], 0.0};
        double w = g.weights[i] * half[0] * g.weights[j] * half[1];
        if (box.dim == 3) {
          x[2] = mid[2] + half[2] * g.nodes[k];
          w *= g.weights[k] * half[2];
        }
        q.add(x, w);
      }
    }
  }
  return q;
}

std::string to_string(CellClass c) {
  switch (c) {
    case CellClass::Inside: return "inside";
    case CellClass::Outside: return "outside";
    case CellClass::Cut: return "cut";
  }
  return "unknown";
}

CellClass classify_cell(const ImplicitField& phi, const Box& box, int samples_per_axis) {
  if (samples_per_axis < 2) throw std::invalid_argument("classify_cell needs >= 2 samples per axis");
  const int n = samples_per_axis;
  const int nz = box.dim == 3 ? n : 1;
  bool any_neg = false, any_pos = false;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int idx[3] = {i, j, k};
        Point x{};
        for (int a = 0; a < box.dim; ++a) {
          x[a] = idx[a] == n - 1 ? box.hi[a]
                                 : box.lo[a] + box.width(a) * (static_cast<double>(idx[a]) / (n - 1));
        }
        const double v = phi(x);
        if (std::abs(v) < kInterfaceSampleTolerance) return CellClass::Cut;
        (v < 0.0 ? any_neg : any_pos) = true;
        if (any_neg && any_pos) return CellClass::Cut;
      }
    }
  }
  return any_neg ? CellClass::Inside : CellClass::Outside;
}

double rule_total(const QuadratureData& q) {
  double s = 0.0;
  for (double w : q.weights) s += w;
  return s;
}

double integrate(const QuadratureData& q, const std::function<double(const Point&)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * f(q.points[i]);
  return s;
}

std::string quadrature_csv_text(const QuadratureData& q) {
  std::string out = q.dim == 3 ? "x,y,z,weight,cell\n" : "x,y,weight,cell\n";
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto& p = q.points[i];
    if (q.dim == 3) {
      out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},", p[0], p[1], p[2], q.weights[i]);
    } else {
      out += fmt::format("{:.17g},{:.17g},{:.17g},", p[0], p[1], q.weights[i]);
    }
    if (q.cell_index[i] != kNoCell) out += std::to_string(q.cell_index[i]);
    out += '\n';
  }
  return out;
}

void write_quadrature_csv(const QuadratureData& q, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << quadrature_csv_text(q);
}

}  // namespace cutquad
