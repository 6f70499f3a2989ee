#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "cutquad/integrator.hpp"

namespace cutquad {

void IntegratorRegistry::add(const std::string& name, Factory factory) {
  if (contains(name)) throw std::invalid_argument("integrator '" + name + "' registered twice");
  factories_.emplace_back(name, std::move(factory));
}

bool IntegratorRegistry::contains(const std::string& name) const {
  for (const auto& [n, f] : factories_) {
    if (n == name) return true;
  }
  return false;
}

IntegratorPtr IntegratorRegistry::create(const std::string& name, const ParameterMap& params) const {
  for (const auto& [n, f] : factories_) {
    if (n == name) return f(params);
  }
  throw std::invalid_argument(
      fmt::format("unknown integrator '{}' (known: {})", name, fmt::join(names(), ", ")));
}

std::vector<std::string> IntegratorRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [n, f] : factories_) out.push_back(n);
  return out;
}

const IntegratorRegistry& builtin_registry() {
  static const IntegratorRegistry registry = [] {
    IntegratorRegistry r;
    r.add("quadtree", [](const ParameterMap& p) { return std::make_shared<QuadtreeIntegrator>(p); });
    r.add("linear",
          [](const ParameterMap& p) { return std::make_shared<LinearReconstructionIntegrator>(p); });
    r.add("momentfit", [](const ParameterMap& p) { return std::make_shared<MomentFittingIntegrator>(p); });
    r.add("flux", [](const ParameterMap& p) { return std::make_shared<ParametricFluxIntegrator>(p); });
    r.add("montecarlo", [](const ParameterMap& p) { return std::make_shared<MonteCarloIntegrator>(p); });
    return r;
  }();
  return registry;
}

std::map<std::string, ParameterMap> parse_parameter_assignments(
    const std::vector<std::string>& assignments) {
  std::map<std::string, ParameterMap> out;
  for (const auto& a : assignments) {
    const auto dot = a.find('.');
    const auto eq = a.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot == 0 || eq < dot + 2 ||
        eq + 1 == a.size()) {
      throw std::invalid_argument("parameter must look like name.key=value, got '" + a + "'");
    }
    out[a.substr(0, dot)][a.substr(dot + 1, eq - dot - 1)] = a.substr(eq + 1);
  }
  return out;
}

}  // namespace cutquad
