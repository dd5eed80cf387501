#include "krf/radial_geometry.hpp"

#include <cmath>
#include <cstddef>

namespace krf {

namespace {

void check_resolution(const RadialGrid& g) {
  if (g.m < 5)
    throw InsufficientResolutionError(
        "second-order stencils need at least 5 nodes, got " + std::to_string(g.m));
}

}  // namespace

Field d_dy(const RadialGrid& g, const Field& f) {
  check_resolution(g);
  const int m = g.m;
  const double h = g.h;
  Field out(m);
  out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (int i = 1; i < m - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  out[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * h);
  return out;
}

Field d2_dy2(const RadialGrid& g, const Field& f) {
  check_resolution(g);
  const int m = g.m;
  const double h2 = g.h * g.h;
  Field out(m);
  out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  for (int i = 1; i < m - 1; ++i) out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
  out[m - 1] = (2.0 * f[m - 1] - 5.0 * f[m - 2] + 4.0 * f[m - 3] - f[m - 4]) / h2;
  return out;
}

Field d_drho(const RadialGrid& g, const Field& f) {
  Field fy = d_dy(g, f);
  for (int i = 0; i < g.m; ++i) fy[i] /= g.drho_dy(i);
  return fy;
}

MetricEigenvalues metric_eigenvalues(const RadialPotential& phi) {
  const RadialGrid& g = *phi.grid;
  check_resolution(g);
  const Field fy = d_dy(g, phi.values);
  const Field fyy = d2_dy2(g, phi.values);
  MetricEigenvalues eig;
  eig.grid = phi.grid;
  eig.A.resize(g.m);
  eig.B.resize(g.m);
  for (int i = 0; i < g.m; ++i) {
    const double s = g.drho_dy(i);  // d(rho)/dy
    const double d1 = fy[i] / s;    // Phi'
    // rho_y = R2 - rho gives Phi'' = (Phi_yy + Phi_y) / (R2 - rho)^2.
    const double d2 = (fyy[i] + fy[i]) / (s * s);
    eig.A[i] = d1;
    eig.B[i] = d1 + g.rho[i] * d2;
  }
  return eig;
}

void require_positive(const MetricEigenvalues& eig, const char* what) {
  for (std::size_t i = 0; i < eig.A.size(); ++i) {
    if (!(eig.A[i] > 0.0) || !(eig.B[i] > 0.0))
      throw NonKahlerError(std::string(what) + ": non-positive metric eigenvalue",
                           static_cast<int>(i));
  }
}

Field ma_determinant(const MetricEigenvalues& eig, int n) {
  require_positive(eig, "ma_determinant");
  Field det(eig.A.size());
  for (std::size_t i = 0; i < det.size(); ++i)
    det[i] = std::pow(eig.A[i], n - 1) * eig.B[i];
  return det;
}

Field laplacian_radial(const Field& v, const MetricEigenvalues& eig, int n) {
  const RadialGrid& g = *eig.grid;
  require_positive(eig, "laplacian_radial");
  const Field vy = d_dy(g, v);
  const Field vyy = d2_dy2(g, v);
  Field out(g.m);
  for (int i = 0; i < g.m; ++i) {
    const double s = g.drho_dy(i);
    const double d1 = vy[i] / s;
    const double d2 = (vyy[i] + vy[i]) / (s * s);
    if (i == 0) {
      out[i] = n * d1 / eig.A[i];
    } else {
      out[i] = (n - 1) * d1 / eig.A[i] + (d1 + g.rho[i] * d2) / eig.B[i];
    }
  }
  return out;
}

Field ricci_potential_from_eigenvalues(const MetricEigenvalues& eig, int n) {
  require_positive(eig, "ricci_potential");
  Field out(eig.A.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = -((n - 1) * std::log(eig.A[i]) + std::log(eig.B[i]));
  return out;
}

RadialPotential ricci_potential(const RadialPotential& phi, int n) {
  MetricEigenvalues eig = metric_eigenvalues(phi);
  return RadialPotential{phi.grid, ricci_potential_from_eigenvalues(eig, n)};
}

namespace {

// [-(X' + rho X'') + rho (X')^2 / X] for a positive field X(rho); this is the
// numerator of the sectional-curvature expression of the 1-d slice metric
// X |dz|^2 restricted to the rho-axis.
Field slice_curvature_numerator(const RadialGrid& g, const Field& X) {
  const Field Xy = d_dy(g, X);
  const Field Xyy = d2_dy2(g, X);
  Field out(g.m);
  for (int i = 0; i < g.m; ++i) {
    const double s = g.drho_dy(i);
    const double d1 = Xy[i] / s;
    const double d2 = (Xyy[i] + Xy[i]) / (s * s);
    out[i] = -(d1 + g.rho[i] * d2) + g.rho[i] * d1 * d1 / X[i];
  }
  return out;
}

}  // namespace

CurvatureComponents curvature_from_eigenvalues(const MetricEigenvalues& eig, int n) {
  const RadialGrid& g = *eig.grid;
  require_positive(eig, "curvature_components");
  CurvatureComponents c;
  const Field numB = slice_curvature_numerator(g, eig.B);
  c.H_rad.resize(g.m);
  for (int i = 0; i < g.m; ++i) c.H_rad[i] = numB[i] / (eig.B[i] * eig.B[i]);
  if (n >= 2) {
    const Field numA = slice_curvature_numerator(g, eig.A);
    const Field Ap = d_drho(g, eig.A);
    c.H_mix.resize(g.m);
    c.H_tan.resize(g.m);
    c.H_cross.resize(g.m);
    for (int i = 0; i < g.m; ++i) {
      c.H_mix[i] = numA[i] / (eig.A[i] * eig.B[i]);
      c.H_tan[i] = -2.0 * Ap[i] / (eig.A[i] * eig.A[i]);
      c.H_cross[i] = -Ap[i] / (eig.A[i] * eig.A[i]);
    }
  }
  return c;
}

CurvatureComponents curvature_components(const RadialPotential& phi, int n) {
  if (n < 1) throw UnsupportedDimensionError("dimension must be >= 1");
  return curvature_from_eigenvalues(metric_eigenvalues(phi), n);
}

Field geodesic_length_profile(const MetricEigenvalues& eig) {
  const RadialGrid& g = *eig.grid;
  Field length(g.m, 0.0);
  double r_prev = 0.0;
  double integrand_prev = std::sqrt(std::max(eig.B[0], 0.0));
  for (int i = 1; i < g.m; ++i) {
    const double r = std::sqrt(g.rho[i]);
    const double integrand = std::sqrt(std::max(eig.B[i], 0.0));
    length[i] = length[i - 1] + 0.5 * (integrand + integrand_prev) * (r - r_prev);
    r_prev = r;
    integrand_prev = integrand;
  }
  return length;
}

double radial_geodesic_length(const MetricEigenvalues& eig, double up_to_y) {
  const RadialGrid& g = *eig.grid;
  const Field profile = geodesic_length_profile(eig);
  if (up_to_y >= g.y_max) return profile.back();
  int i = static_cast<int>(up_to_y / g.h);
  if (i < 0) return 0.0;
  if (i >= g.m - 1) return profile.back();
  // linear interpolation between nodes
  const double w = (up_to_y - g.y[i]) / g.h;
  return profile[i] * (1.0 - w) + profile[i + 1] * w;
}

}  // namespace krf
