#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cutquad/geometry.hpp"
#include "cutquad/quadrature.hpp"
#include "cutquad/testcase.hpp"

namespace cutquad {

/// The six measures every integrator answers.
enum class Operation {
  Area2D,
  Volume3D,
  InterfaceCurveLength,
  InterfaceSurfaceArea,
  AreaViaFlux2D,
  VolumeViaFlux3D,
};

inline constexpr Operation kAllOperations[] = {
    Operation::Area2D,        Operation::Volume3D,       Operation::InterfaceCurveLength,
    Operation::InterfaceSurfaceArea, Operation::AreaViaFlux2D, Operation::VolumeViaFlux3D,
};

/// area2d, volume3d, curve_length, surface_area, area_flux2d, volume_flux3d.
std::string to_string(Operation op);
Operation operation_from_string(const std::string& name);

/// Dimension of the test cases an operation applies to.
int operation_dim(Operation op);

/// Reference measure an operation estimates.
MeasureKind operation_measure(Operation op);

enum class InterfaceType { Implicit, Parametric };
std::string to_string(InterfaceType t);

/// Ordered name -> value parameter map, rendered as "k1=v1;k2=v2".
using ParameterMap = std::map<std::string, std::string>;
std::string property_string(const ParameterMap& params);

struct IntegratorDescriptor {
  std::string name;
  InterfaceType interface_type = InterfaceType::Implicit;
  std::set<int> supported_dims;
  std::set<Operation> capabilities;
  ParameterMap parameters;

  /// Whether `op` on a `dim`-dimensional case is answered with a value.
  bool supports(Operation op, int dim) const;

  std::string to_json_text() const;
};

enum class Status { Ok, Unsupported, Failed };
std::string to_string(Status s);

struct IntegrationResult {
  double value = 0.0;
  QuadratureData quadrature;
  std::size_t n_points = 0;
  double runtime_s = 0.0;
  Status status = Status::Unsupported;
  std::string message;

  bool ok() const { return status == Status::Ok; }
};

/// Unified integrator contract. The public compute_* calls never throw:
/// unsupported combinations come back as Status::Unsupported and any
/// exception raised by a method becomes Status::Failed with its message.
/// Instances are immutable and safe to share across threads.
class Integrator {
 public:
  virtual ~Integrator() = default;

  virtual const IntegratorDescriptor& descriptor() const = 0;
  const std::string& name() const { return descriptor().name; }

  IntegrationResult compute_area_2d(const TestCase& tc, const CartesianMesh& mesh, int order) const;
  IntegrationResult compute_volume_3d(const TestCase& tc, const CartesianMesh& mesh, int order) const;
  IntegrationResult compute_interface_curve_length(const TestCase& tc, const CartesianMesh& mesh,
                                                   int order) const;
  IntegrationResult compute_interface_surface_area(const TestCase& tc, const CartesianMesh& mesh,
                                                   int order) const;
  IntegrationResult compute_area_via_flux_2d(const TestCase& tc, const CartesianMesh& mesh,
                                             int order) const;
  IntegrationResult compute_volume_via_flux_3d(const TestCase& tc, const CartesianMesh& mesh,
                                               int order) const;

  IntegrationResult compute(Operation op, const TestCase& tc, const CartesianMesh& mesh,
                            int order) const;

 protected:
  /// Value plus the quadrature that produced it.
  struct Estimate {
    double value = 0.0;
    QuadratureData quadrature;
  };

  /// Called only for operations in the descriptor's capabilities, with a test
  /// case of matching dimension. May throw.
  virtual Estimate evaluate(Operation op, const TestCase& tc, const CartesianMesh& mesh,
                            int order) const = 0;
};

using IntegratorPtr = std::shared_ptr<const Integrator>;

// Built-in methods -----------------------------------------------------------

/// Recursive bisection of cut cells (quadtree in 2D, octree in 3D) with
/// center-sample leaves. Parameters: depth (2D, default 6), depth3d
/// (default 2), samples (classification lattice, default 3).
class QuadtreeIntegrator final : public Integrator {
 public:
  explicit QuadtreeIntegrator(const ParameterMap& params = {});
  const IntegratorDescriptor& descriptor() const override { return desc_; }
  int depth_for(int dim) const { return dim == 3 ? depth3d_ : depth_; }

 protected:
  Estimate evaluate(Operation op, const TestCase& tc, const CartesianMesh& mesh,
                    int order) const override;

 private:
  IntegratorDescriptor desc_;
  int depth_ = 6;
  int depth3d_ = 2;
  int samples_ = kDefaultSamplesPerAxis;
};

/// Marching-squares linear interface reconstruction: cut cells become
/// polygons (fan-triangulated for area), the interface becomes straight
/// segments (length and flux). Parameter: samples (default 3).
class LinearReconstructionIntegrator final : public Integrator {
 public:
  explicit LinearReconstructionIntegrator(const ParameterMap& params = {});
  const IntegratorDescriptor& descriptor() const override { return desc_; }

 protected:
  Estimate evaluate(Operation op, const TestCase& tc, const CartesianMesh& mesh,
                    int order) const override;

 private:
  IntegratorDescriptor desc_;
  int samples_ = kDefaultSamplesPerAxis;
};

/// Moment fitting on cut cells with fixed tensor Gauss nodes. Parameter:
/// degree (default 3, clamped to order - 1).
class MomentFittingIntegrator final : public Integrator {
 public:
  explicit MomentFittingIntegrator(const ParameterMap& params = {});
  const IntegratorDescriptor& descriptor() const override { return desc_; }

 protected:
  Estimate evaluate(Operation op, const TestCase& tc, const CartesianMesh& mesh,
                    int order) const override;

 private:
  IntegratorDescriptor desc_;
  int degree_ = 3;
};

/// Mesh-free Green's theorem on the NURBS loop. Parameter: min_order
/// (default 20); each knot span uses max(order, min_order) Gauss points.
class ParametricFluxIntegrator final : public Integrator {
 public:
  explicit ParametricFluxIntegrator(const ParameterMap& params = {});
  const IntegratorDescriptor& descriptor() const override { return desc_; }
  int effective_order(int order) const;

 protected:
  Estimate evaluate(Operation op, const TestCase& tc, const CartesianMesh& mesh,
                    int order) const override;

 private:
  IntegratorDescriptor desc_;
  int min_order_ = 20;
};

/// Seeded Monte Carlo sampling of the domain box. Parameters: samples
/// (default 1000000), seed (default 42).
class MonteCarloIntegrator final : public Integrator {
 public:
  explicit MonteCarloIntegrator(const ParameterMap& params = {});
  const IntegratorDescriptor& descriptor() const override { return desc_; }

 protected:
  Estimate evaluate(Operation op, const TestCase& tc, const CartesianMesh& mesh,
                    int order) const override;

 private:
  IntegratorDescriptor desc_;
  std::uint64_t samples_ = 1000000;
  std::uint64_t seed_ = 42;
};

// Parametric building blocks ----------------------------------------------------

/// Interface rule on the loop: per knot span, `order` Gauss points with
/// arc-length weights and outward normals.
QuadratureData parametric_interface_rule(const NurbsLoop& loop, int order);

/// sum over curves and spans of Gauss(order) applied to x(t) y'(t).
/// Positive for counter-clockwise loops.
double flux_area_parametric(const NurbsLoop& loop, int order, QuadratureData* rule = nullptr);

/// 1/2 of the loop integral of (x y' - y x').
double symmetric_flux_area_parametric(const NurbsLoop& loop, int order);

/// Loop integral of |x'(t)|.
double arc_length_parametric(const NurbsLoop& loop, int order);

// Registry -------------------------------------------------------------------

class IntegratorRegistry {
 public:
  using Factory = std::function<IntegratorPtr(const ParameterMap&)>;

  /// Throws std::invalid_argument on a duplicate name.
  void add(const std::string& name, Factory factory);

  /// Throws std::invalid_argument for unknown names or parameters.
  IntegratorPtr create(const std::string& name, const ParameterMap& params = {}) const;

  std::vector<std::string> names() const;
  bool contains(const std::string& name) const;

 private:
  std::vector<std::pair<std::string, Factory>> factories_;
};

/// quadtree, linear, momentfit, flux, montecarlo.
const IntegratorRegistry& builtin_registry();

/// Splits "name.key=value" assignments into per-integrator parameter maps.
std::map<std::string, ParameterMap> parse_parameter_assignments(
    const std::vector<std::string>& assignments);

}  // namespace cutquad
