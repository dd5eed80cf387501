#include "krf/grid.hpp"

#include <cmath>

namespace krf {

GridPtr make_grid(int n, double R2, double y_max, int m) {
  if (n < 1) throw Error("complex dimension must be >= 1");
  if (R2 <= 0.0) throw Error("R2 must be positive");
  if (y_max <= 0.0) throw Error("y_max must be positive");
  if (m < 5)
    throw InsufficientResolutionError("grid needs at least 5 nodes for the stencils");
  auto g = std::make_shared<RadialGrid>();
  g->n = n;
  g->R2 = R2;
  g->y_max = y_max;
  g->m = m;
  g->h = y_max / static_cast<double>(m - 1);
  g->y.resize(m);
  g->rho.resize(m);
  for (int i = 0; i < m; ++i) {
    g->y[i] = g->h * i;
    g->rho[i] = R2 * (1.0 - std::exp(-g->y[i]));
  }
  g->y[0] = 0.0;
  g->rho[0] = 0.0;
  return g;
}

}  // namespace krf
