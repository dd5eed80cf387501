#pragma once

#include "krf/radial_geometry.hpp"

namespace krf {

// Defining function of the domain {phi < 0}, sampled with exact first and
// second rho-derivatives so that downstream quantities carry no
// differentiation error.
struct DefiningFunction {
  GridPtr grid;
  Field phi;
  Field phi_prime;
  Field phi_second;
};

void validate_defining_function(const DefiningFunction& df);

// A radial metric carried as potential plus eigenvalue fields. Presets store
// exact eigenvalues; metrics built from sampled data store differenced ones.
struct RadialMetric {
  RadialPotential potential;
  MetricEigenvalues eig;
};

// Cheng-Yau background: potential -log(-phi) with eigenvalues assembled from
// the exact derivative fields of phi.
RadialMetric background_metric(const DefiningFunction& df);

// f = log(det(phi_ij) (|dphi|^2_phi - phi)), using the radial identities
// det = A^(n-1) B and |dphi|^2_phi = (phi')^2 rho / B.
Field cheng_yau_f(const DefiningFunction& df, int n);

enum class FlowMode {
  Unnormalized,
  Normalized,
  GeneralUnnormalized,
  GeneralNormalized,
};

bool is_normalized(FlowMode mode);
bool is_general(FlowMode mode);
const char* mode_name(FlowMode mode);
FlowMode mode_from_name(const std::string& name);

// Evolving background data shared by the flows: initial potential, base
// direction of the deformation (omega-bar for domain modes, -Ric(omega_M) for
// general modes), reference volume metric, and the zeroth-order data.
struct BackgroundFamily {
  FlowMode mode = FlowMode::Unnormalized;
  int n = 2;
  double lambda = 3.0;    // n+1 for domain modes, 1 for general modes
  RadialMetric omega0;
  RadialMetric base;       // omega-bar or -Ric(omega_M)
  RadialMetric reference;  // omega-bar or omega_M (volume-form denominator)
  Field fmap;              // Cheng-Yau f for domain modes, zero otherwise

  // coefficient of -u in the flow right-hand side
  double zeroth_order() const;
};

// Coefficients (a0, ab) with family potential a0*Phi0 + ab*Phi_base.
struct FamilyCoefficients {
  double a0;
  double ab;
};
FamilyCoefficients family_coefficients(const BackgroundFamily& bf, double t, double eps);

RadialMetric family_at(const BackgroundFamily& bf, double t, double eps);

// Node-wise spread of ricci_potential(bar Phi) + (n+1) bar Phi + f, which is
// constant in the continuum; all derivatives by finite differences.
double cy_identity_residual(const DefiningFunction& df, int n);

// Smallest c with omega0 <= c * comparison, node-wise on eigenvalues.
double domination_constant(const RadialMetric& omega0, const RadialMetric& comparison);

}  // namespace krf
