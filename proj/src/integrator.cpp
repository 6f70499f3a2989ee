#include "cutquad/integrator.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace cutquad {

std::string to_string(Operation op) {
  switch (op) {
    case Operation::Area2D: return "area2d";
    case Operation::Volume3D: return "volume3d";
    case Operation::InterfaceCurveLength: return "curve_length";
    case Operation::InterfaceSurfaceArea: return "surface_area";
    case Operation::AreaViaFlux2D: return "area_flux2d";
    case Operation::VolumeViaFlux3D: return "volume_flux3d";
  }
  return "unknown";
}

Operation operation_from_string(const std::string& name) {
  for (Operation op : kAllOperations) {
    if (to_string(op) == name) return op;
  }
  throw std::invalid_argument("unknown operation '" + name + "'");
}

int operation_dim(Operation op) {
  switch (op) {
    case Operation::Area2D:
    case Operation::InterfaceCurveLength:
    case Operation::AreaViaFlux2D:
      return 2;
    default:
      return 3;
  }
}

MeasureKind operation_measure(Operation op) {
  switch (op) {
    case Operation::Area2D:
    case Operation::AreaViaFlux2D:
      return MeasureKind::Area;
    case Operation::InterfaceCurveLength: return MeasureKind::Perimeter;
    case Operation::InterfaceSurfaceArea: return MeasureKind::SurfaceArea;
    case Operation::Volume3D:
    case Operation::VolumeViaFlux3D:
      return MeasureKind::Volume;
  }
  return MeasureKind::Area;
}

std::string to_string(InterfaceType t) {
  return t == InterfaceType::Implicit ? "implicit" : "parametric";
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::Unsupported: return "unsupported";
    case Status::Failed: return "failed";
  }
  return "unknown";
}

std::string property_string(const ParameterMap& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += ';';
    out += k + '=' + v;
  }
  return out;
}

bool IntegratorDescriptor::supports(Operation op, int dim) const {
  return capabilities.contains(op) && supported_dims.contains(dim) && operation_dim(op) == dim;
}

std::string IntegratorDescriptor::to_json_text() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["interface_type"] = to_string(interface_type);
  j["supported_dims"] = supported_dims;
  auto caps = nlohmann::ordered_json::array();
  for (Operation op : kAllOperations) {
    if (capabilities.contains(op)) caps.push_back(to_string(op));
  }
  j["capabilities"] = caps;
  j["parameters"] = parameters;
  j["property_string"] = property_string(parameters);
  return j.dump(2);
}

IntegrationResult Integrator::compute(Operation op, const TestCase& tc, const CartesianMesh& mesh,
                                      int order) const {
  IntegrationResult r;
  const auto& desc = descriptor();
  if (!desc.supports(op, tc.dim)) {
    r.status = Status::Unsupported;
    r.message = fmt::format("{} does not provide {} for {}D cases", desc.name, to_string(op), tc.dim);
    return r;
  }
  if (desc.interface_type == InterfaceType::Parametric && !tc.loop) {
    r.status = Status::Unsupported;
    r.message = fmt::format("test case '{}' has no parametric representation", tc.id);
    return r;
  }
  try {
    if (mesh.dim() != tc.dim) {
      throw std::invalid_argument(fmt::format("{}D mesh for a {}D test case", mesh.dim(), tc.dim));
    }
    const auto start = std::chrono::steady_clock::now();
    Estimate e = evaluate(op, tc, mesh, order);
    const auto stop = std::chrono::steady_clock::now();
    r.runtime_s =
        std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count() * 1e-9;
    if (!std::isfinite(e.value)) throw std::runtime_error("integrator produced a non-finite value");
    e.quadrature.validate();
    r.value = e.value;
    r.n_points = e.quadrature.size();
    r.quadrature = std::move(e.quadrature);
    r.quadrature.generator = desc.name;
    r.status = Status::Ok;
  } catch (const std::exception& ex) {
    r = IntegrationResult{};
    r.status = Status::Failed;
    r.message = ex.what();
  } catch (...) {
    r = IntegrationResult{};
    r.status = Status::Failed;
    r.message = "unknown exception";
  }
  return r;
}

IntegrationResult Integrator::compute_area_2d(const TestCase& tc, const CartesianMesh& mesh,
                                              int order) const {
  return compute(Operation::Area2D, tc, mesh, order);
}

IntegrationResult Integrator::compute_volume_3d(const TestCase& tc, const CartesianMesh& mesh,
                                                int order) const {
  return compute(Operation::Volume3D, tc, mesh, order);
}

IntegrationResult Integrator::compute_interface_curve_length(const TestCase& tc,
                                                             const CartesianMesh& mesh,
                                                             int order) const {
  return compute(Operation::InterfaceCurveLength, tc, mesh, order);
}

IntegrationResult Integrator::compute_interface_surface_area(const TestCase& tc,
                                                             const CartesianMesh& mesh,
                                                             int order) const {
  return compute(Operation::InterfaceSurfaceArea, tc, mesh, order);
}

IntegrationResult Integrator::compute_area_via_flux_2d(const TestCase& tc,
                                                       const CartesianMesh& mesh, int order) const {
  return compute(Operation::AreaViaFlux2D, tc, mesh, order);
}

IntegrationResult Integrator::compute_volume_via_flux_3d(const TestCase& tc,
                                                         const CartesianMesh& mesh,
                                                         int order) const {
  return compute(Operation::VolumeViaFlux3D, tc, mesh, order);
}

}  // namespace cutquad
