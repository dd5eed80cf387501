#pragma once

#include <memory>
#include <vector>

#include "krf/errors.hpp"

namespace krf {

using Field = std::vector<double>;

// Uniform mesh in the compactified coordinate y = -log(1 - rho/R2), where
// rho = |z|^2 on the domain {rho < R2}. The boundary rho = R2 corresponds to
// y = infinity and is truncated at y_max.
struct RadialGrid {
  int n;         // complex dimension
  double R2;     // boundary value of rho
  double y_max;  // truncation of the compactified coordinate
  int m;         // number of nodes
  double h;      // uniform y-spacing
  std::vector<double> y;
  std::vector<double> rho;

  // d(rho)/dy = R2 - rho, exact for this chart.
  double drho_dy(int i) const { return R2 - rho[i]; }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(int n, double R2, double y_max, int m);

}  // namespace krf
