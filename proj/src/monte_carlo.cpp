#include <cmath>
#include <random>

#include "cutquad/cut_cell.hpp"

namespace cutquad {

double MonteCarloEstimate::sigma() const {
  if (samples == 0) return 0.0;
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return box_measure * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
}

MonteCarloEstimate monte_carlo_measure(const ImplicitField& phi, const Box& box, std::uint64_t n,
                                       std::uint64_t seed, QuadratureData* hits) {
  if (n == 0) throw std::invalid_argument("Monte Carlo needs at least one sample");
  std::mt19937_64 rng(seed);
  MonteCarloEstimate est;
  est.samples = n;
  est.box_measure = box.measure();
  const double w = est.box_measure / static_cast<double>(n);
  if (hits) hits->dim = box.dim;
  for (std::uint64_t s = 0; s < n; ++s) {
    Point x{};
    for (int a = 0; a < box.dim; ++a) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      x[a] = box.lo[a] + u * box.width(a);
    }
    if (phi(x) <= 0.0) {
      ++est.hits;
      if (hits) hits->add(x, w);
    }
  }
  est.value = est.box_measure * (static_cast<double>(est.hits) / static_cast<double>(n));
  return est;
}

}  // namespace cutquad
