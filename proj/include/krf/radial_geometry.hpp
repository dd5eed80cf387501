#pragma once

#include "krf/grid.hpp"

namespace krf {

// Kähler potential of a U(n)-invariant form, sampled at the grid nodes as a
// function of rho.
struct RadialPotential {
  GridPtr grid;
  Field values;
};

// Eigenvalue fields of a radial Kähler metric omega = i ddbar Phi(rho):
// tangential A = Phi'(rho) (multiplicity n-1) and radial B = Phi' + rho Phi''.
struct MetricEigenvalues {
  GridPtr grid;
  Field A;
  Field B;
};

// Normalized curvature components of a U(n)-invariant metric along the
// rho-axis. For n = 1 only H_rad is populated.
struct CurvatureComponents {
  Field H_rad;    // radial holomorphic sectional
  Field H_mix;    // bisectional, radial vs tangential
  Field H_tan;    // tangential holomorphic sectional
  Field H_cross;  // bisectional, two orthogonal tangential directions
};

// Second-order differentiation in y, one-sided second-order stencils at both
// ends. Requires at least 5 nodes.
Field d_dy(const RadialGrid& g, const Field& f);
Field d2_dy2(const RadialGrid& g, const Field& f);

// First/second rho-derivatives via the exact chain rule of the chart.
Field d_drho(const RadialGrid& g, const Field& f);

MetricEigenvalues metric_eigenvalues(const RadialPotential& phi);

// Positivity check: throws NonKahlerError with the offending node.
void require_positive(const MetricEigenvalues& eig, const char* what);

// det g = A^(n-1) B per node. Throws NonKahlerError on a non-positive input.
Field ma_determinant(const MetricEigenvalues& eig, int n);

// Laplacian of a radial function v with respect to the metric (A, B):
// (n-1) v'/A + (v' + rho v'')/B, with the continuous limit n v'(0)/A(0) at
// the center.
Field laplacian_radial(const Field& v, const MetricEigenvalues& eig, int n);

// Potential whose i ddbar is Ric(omega): -log(A^(n-1) B).
RadialPotential ricci_potential(const RadialPotential& phi, int n);
Field ricci_potential_from_eigenvalues(const MetricEigenvalues& eig, int n);

CurvatureComponents curvature_components(const RadialPotential& phi, int n);
CurvatureComponents curvature_from_eigenvalues(const MetricEigenvalues& eig, int n);

// Radial length \int_0^{r(y)} sqrt(B(r^2)) dr, trapezoid rule in r = sqrt(rho).
// Only divergence/finiteness as up_to_y grows is meaningful.
double radial_geodesic_length(const MetricEigenvalues& eig, double up_to_y);
// Cumulative length at every node.
Field geodesic_length_profile(const MetricEigenvalues& eig);

}  // namespace krf
