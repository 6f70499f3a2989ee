#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cutquad/geometry.hpp"

namespace cutquad {

/// Any scalar field whose zero set is an interface and whose non-positive
/// region is the enclosed domain. LevelSet converts implicitly.
using ImplicitField = std::function<double(const Point&)>;

inline constexpr std::int64_t kNoCell = -1;

/// Points and weights produced by an integrator.
///
/// Volume rules leave `normals` empty. Interface rules carry the unit outward
/// normal at each point and arc-length (or surface) weights, so a flux
/// F.n dS is sum_i w_i F(x_i).n_i.
///
/// Weights are non-negative for every method except moment fitting, whose
/// least-squares weights may be signed.
struct QuadratureData {
  int dim = 2;
  std::vector<Point> points;
  std::vector<double> weights;
  std::vector<std::int64_t> cell_index;
  std::vector<Point> normals;
  std::string generator;

  std::size_t size() const { return weights.size(); }
  bool empty() const { return weights.empty(); }
  bool has_normals() const { return !normals.empty(); }

  void add(const Point& x, double w, std::int64_t cell = kNoCell) {
    points.push_back(x);
    weights.push_back(w);
    cell_index.push_back(cell);
  }
  void add(const Point& x, double w, const Point& normal, std::int64_t cell) {
    add(x, w, cell);
    normals.push_back(normal);
  }

  /// Appends `other`, overriding its cell index when `cell` != kNoCell.
  void append(const QuadratureData& other, std::int64_t cell = kNoCell);

  /// Throws std::logic_error if sizes differ or weights are non-finite.
  void validate() const;
};

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n, 1 <= n <= 64.
const GaussRule& gauss_legendre(int n);

/// n^dim tensor Gauss rule affinely mapped onto `box`.
QuadratureData tensor_rule(int n, const Box& box);

enum class CellClass { Inside, Outside, Cut };

std::string to_string(CellClass c);

inline constexpr double kInterfaceSampleTolerance = 1e-14;
inline constexpr int kDefaultSamplesPerAxis = 3;

/// Samples phi on a samples_per_axis^dim lattice (corners included).
/// All negative -> Inside, all positive -> Outside; mixed signs or any
/// |phi| < 1e-14 -> Cut. Thin features between lattice points are missed.
CellClass classify_cell(const ImplicitField& phi, const Box& box,
                        int samples_per_axis = kDefaultSamplesPerAxis);

/// Sum of weights, sequential in index order.
double rule_total(const QuadratureData& q);

/// Sum of w_i * f(x_i), sequential in index order.
double integrate(const QuadratureData& q, const std::function<double(const Point&)>& f);

/// Neutral CSV dump: header `x,y[,z],weight,cell`, 17 significant digits,
/// empty `cell` field when no cell is attached.
void write_quadrature_csv(const QuadratureData& q, const std::filesystem::path& path);
std::string quadrature_csv_text(const QuadratureData& q);

}  // namespace cutquad
