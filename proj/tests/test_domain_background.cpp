#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <functional>

#include "doctest.h"
#include "krf/domain_background.hpp"

using namespace krf;

namespace {

DefiningFunction ball_df(const GridPtr& g) {
  DefiningFunction df{g, Field(g->m), Field(g->m, 1.0), Field(g->m, 0.0)};
  for (int i = 0; i < g->m; ++i) df.phi[i] = g->rho[i] - g->R2;
  return df;
}

DefiningFunction perturbed_df(const GridPtr& g, double a) {
  DefiningFunction df{g, Field(g->m), Field(g->m), Field(g->m)};
  const double c = g->R2 + a * g->R2 * g->R2;
  for (int i = 0; i < g->m; ++i) {
    df.phi[i] = g->rho[i] + a * g->rho[i] * g->rho[i] - c;
    df.phi_prime[i] = 1.0 + 2.0 * a * g->rho[i];
    df.phi_second[i] = 2.0 * a;
  }
  return df;
}

// log(det(phi_ij) (|dphi|^2_phi - phi)) computed in full coordinates of C^2
// by finite differences, independent of the radial identities.
double cheng_yau_oracle(const std::function<double(double)>& phi,
                        std::complex<double> z1, std::complex<double> z2) {
  using C = std::complex<double>;
  auto F = [&](double x1, double y1, double x2, double y2) {
    return phi(x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2);
  };
  const double p[4] = {z1.real(), z1.imag(), z2.real(), z2.imag()};
  const double h = 1e-4;
  auto at = [&](int a, double da, int b, double db) {
    double q[4] = {p[0], p[1], p[2], p[3]};
    q[a] += da;
    if (b >= 0) q[b] += db;
    return F(q[0], q[1], q[2], q[3]);
  };
  auto d1 = [&](int a) { return (at(a, h, -1, 0) - at(a, -h, -1, 0)) / (2 * h); };
  auto d2 = [&](int a, int b) {
    if (a == b) return (at(a, h, -1, 0) - 2 * F(p[0], p[1], p[2], p[3]) + at(a, -h, -1, 0)) / (h * h);
    return (at(a, h, b, h) - at(a, h, b, -h) - at(a, -h, b, h) + at(a, -h, b, -h)) /
           (4 * h * h);
  };
  auto g = [&](int i, int j) {
    const int xi = 2 * i, yi = 2 * i + 1, xj = 2 * j, yj = 2 * j + 1;
    return C(0.25 * (d2(xi, xj) + d2(yi, yj)), 0.25 * (d2(xi, yj) - d2(yi, xj)));
  };
  auto dz = [&](int i) { return C(0.5 * d1(2 * i), -0.5 * d1(2 * i + 1)); };
  const C g00 = g(0, 0), g01 = g(0, 1), g10 = g(1, 0), g11 = g(1, 1);
  const C det = g00 * g11 - g01 * g10;
  // inverse transpose contraction: |dphi|^2 = g^{i jbar} phi_i conj(phi_j)
  const C i00 = g11 / det, i01 = -g01 / det, i10 = -g10 / det, i11 = g00 / det;
  const C f0 = dz(0), f1 = dz(1);
  const C grad2 = i00 * std::conj(f0) * f0 + i01 * std::conj(f0) * f1 +
                  i10 * std::conj(f1) * f0 + i11 * std::conj(f1) * f1;
  const double rho = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
  return std::log(det.real() * (grad2.real() - phi(rho)));
}

}  // namespace

TEST_CASE("defining function validation") {
  auto g = make_grid(2, 1.0, 8.0, 201);
  CHECK_NOTHROW(validate_defining_function(ball_df(g)));

  DefiningFunction bad = ball_df(g);
  for (double& v : bad.phi) v += 0.5;  // boundary at rho = 0.5, not R2
  CHECK_THROWS_AS(validate_defining_function(bad), InvalidDefiningFunctionError);

  DefiningFunction pos = ball_df(g);
  pos.phi[10] = 0.1;
  CHECK_THROWS_AS(validate_defining_function(pos), InvalidDefiningFunctionError);

  DefiningFunction notpsh = ball_df(g);
  notpsh.phi_prime[5] = -1.0;
  CHECK_THROWS_AS(validate_defining_function(notpsh), InvalidDefiningFunctionError);
}

TEST_CASE("background metric of the ball is complex hyperbolic") {
  auto g = make_grid(2, 1.0, 8.0, 201);
  const RadialMetric bg = background_metric(ball_df(g));
  for (int i = 0; i < g->m; ++i) {
    const double d = 1.0 - g->rho[i];
    CHECK(bg.eig.A[i] == doctest::Approx(1.0 / d).epsilon(1e-12));
    CHECK(bg.eig.B[i] == doctest::Approx(1.0 / (d * d)).epsilon(1e-12));
    CHECK(bg.potential.values[i] == doctest::Approx(g->y[i]).epsilon(1e-12));
  }
}

TEST_CASE("Cheng-Yau f: ball and perturbed ball") {
  auto g = make_grid(2, 1.0, 8.0, 201);
  const Field f_ball = cheng_yau_f(ball_df(g), 2);
  for (double v : f_ball) CHECK(std::abs(v) < 1e-13);

  const Field f_pert = cheng_yau_f(perturbed_df(g, 0.5), 2);
  // at rho = 0.5: A = 1.5, B = 2, grad2 = 0.5625, -phi = 0.875 -> log 4.3125
  int i_star = 0;
  for (int i = 0; i < g->m; ++i)
    if (std::abs(g->rho[i] - 0.5) < std::abs(g->rho[i_star] - 0.5)) i_star = i;
  const double rho_s = g->rho[i_star];
  auto phi = [](double r) { return r + 0.5 * r * r - 1.5; };
  // point with |z1|^2 = rho/3 and |z2|^2 = 2 rho/3
  const double oracle = cheng_yau_oracle(
      phi, std::sqrt(rho_s / 3.0), std::complex<double>(0.6, std::sqrt(0.3)) *
                                       std::sqrt(2.0 * rho_s / (3.0 * 0.66)));
  CHECK(f_pert[i_star] == doctest::Approx(oracle).epsilon(1e-5));
  CHECK(f_pert[i_star] == doctest::Approx(std::log(4.3125)).epsilon(5e-3));
}

TEST_CASE("Cheng-Yau identity residual vanishes at order two") {
  auto coarse = make_grid(2, 1.0, 8.0, 201);
  auto fine = make_grid(2, 1.0, 8.0, 401);
  // exact ball: no truncation error left, only rounding through the chart
  CHECK(cy_identity_residual(ball_df(coarse), 2) < 1e-8);
  const double rc = cy_identity_residual(perturbed_df(coarse, 0.5), 2);
  const double rf = cy_identity_residual(perturbed_df(fine, 0.5), 2);
  CHECK(rc < 5.0 * coarse->h * coarse->h);
  CHECK(rc / rf > 3.0);
  CHECK(rc / rf < 5.0);
}

TEST_CASE("flow mode helpers") {
  for (FlowMode m : {FlowMode::Unnormalized, FlowMode::Normalized,
                     FlowMode::GeneralUnnormalized, FlowMode::GeneralNormalized})
    CHECK(mode_from_name(mode_name(m)) == m);
  CHECK(is_normalized(FlowMode::Normalized));
  CHECK(!is_normalized(FlowMode::GeneralUnnormalized));
  CHECK(is_general(FlowMode::GeneralNormalized));
  CHECK(!is_general(FlowMode::Unnormalized));
  CHECK_THROWS_AS(mode_from_name("bogus"), Error);
}

TEST_CASE("family coefficients per mode") {
  auto g = make_grid(2, 1.0, 8.0, 201);
  BackgroundFamily bf;
  bf.mode = FlowMode::Unnormalized;
  bf.n = 2;
  bf.lambda = 3.0;
  bf.omega0 = background_metric(ball_df(g));
  bf.base = bf.omega0;
  bf.reference = bf.omega0;
  bf.fmap.assign(g->m, 0.0);

  auto [a0u, abu] = family_coefficients(bf, 0.4, 0.05);
  CHECK(a0u == doctest::Approx(1.0));
  CHECK(abu == doctest::Approx(3.0 * 0.45));
  CHECK(bf.zeroth_order() == 0.0);

  bf.mode = FlowMode::Normalized;
  auto [a0n, abn] = family_coefficients(bf, 0.4, 0.05);
  CHECK(a0n == doctest::Approx(std::exp(-1.2)));
  CHECK(abn == doctest::Approx(1.0 - std::exp(-1.2) + 3.0 * 0.05 * std::exp(-1.2)));
  CHECK(bf.zeroth_order() == 3.0);

  // t = 0 with eps: exactly omega0 + lambda*eps*base
  auto [a00, ab0] = family_coefficients(bf, 0.0, 0.05);
  CHECK(a00 == 1.0);
  CHECK(ab0 == doctest::Approx(0.15));

  // family potential and eigenvalues are the same affine combination
  const RadialMetric fam = family_at(bf, 0.4, 0.05);
  for (int i = 0; i < g->m; i += 37) {
    CHECK(fam.eig.A[i] ==
          doctest::Approx((a0n + abn) * bf.omega0.eig.A[i]).epsilon(1e-12));
    CHECK(fam.potential.values[i] ==
          doctest::Approx((a0n + abn) * bf.omega0.potential.values[i]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(family_coefficients(bf, -1.0, 0.05), Error);
}

TEST_CASE("domination constant") {
  auto g = make_grid(2, 1.0, 8.0, 201);
  const RadialMetric bg = background_metric(ball_df(g));
  RadialMetric omega0;
  omega0.potential = RadialPotential{g, Field(g->m)};
  omega0.eig = MetricEigenvalues{g, Field(g->m, 0.5), Field(g->m, 0.5)};
  for (int i = 0; i < g->m; ++i) omega0.potential.values[i] = 0.5 * g->rho[i];
  CHECK(domination_constant(omega0, bg) == doctest::Approx(0.5).epsilon(1e-9));
}
