#ifndef SGSURF_QUADRATURE_HPP
#define SGSURF_QUADRATURE_HPP

#include <vector>

namespace sgsurf {

/// Gauss-Legendre rule mapped to [0, 1]; weights sum to one.
struct LegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

LegendreRule legendre_unit(int order);

}  // namespace sgsurf

#endif  // SGSURF_QUADRATURE_HPP
