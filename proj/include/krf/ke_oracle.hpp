#pragma once

#include "krf/domain_background.hpp"

namespace krf {

struct KESolution {
  Field u_inf;
  double residual_norm = 0.0;
  int newton_iterations = 0;
  std::vector<double> residual_history;
};

// Background of the limit Monge-Ampère equation: omega-bar for domain modes,
// -Ric(omega_M) for general modes. Both live in bf.base.
const RadialMetric& limit_background(const BackgroundFamily& bf);

// Far-end Dirichlet constant of the limit equation, g_far / lambda.
double limit_boundary_constant(const BackgroundFamily& bf);

// Damped Newton for
//   log(det(base + i ddbar u) / det reference) + f - lambda u = 0,
// initial guess 0 unless provided. Throws SolverFailure with the residual
// history on divergence.
KESolution solve_limit(const BackgroundFamily& bf, double tol,
                       const Field* initial_guess = nullptr);

// Residual of Ric(omega) = -lambda*omega as the node-wise spread of
// ricci_potential + lambda*Phi (constant iff Einstein), from the sampled
// potential alone (all derivatives by finite differences).
double ke_residual(const RadialPotential& metric_potential, double lambda, int n);

// Same defect with the metric's eigenvalue fields supplied exactly; only the
// outer i ddbar is differenced.
double ke_residual(const RadialPotential& metric_potential, const MetricEigenvalues& eig,
                   double lambda, int n);

}  // namespace krf
