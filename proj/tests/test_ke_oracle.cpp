#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "krf/ke_oracle.hpp"

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

BackgroundFamily domain_family(const DefiningFunction& df) {
  const GridPtr g = df.grid;
  BackgroundFamily bf;
  bf.mode = FlowMode::Normalized;
  bf.n = g->n;
  bf.lambda = g->n + 1.0;
  bf.base = background_metric(df);
  bf.reference = bf.base;
  bf.omega0.potential = RadialPotential{g, Field(g->m)};
  bf.omega0.eig = MetricEigenvalues{g, Field(g->m, 0.5), Field(g->m, 0.5)};
  for (int i = 0; i < g->m; ++i) bf.omega0.potential.values[i] = 0.5 * g->rho[i];
  bf.fmap = cheng_yau_f(df, g->n);
  return bf;
}

BackgroundFamily general_hyperbolic_family(const GridPtr& g) {
  BackgroundFamily bf;
  bf.mode = FlowMode::GeneralNormalized;
  bf.n = g->n;
  bf.lambda = 1.0;
  bf.reference = background_metric(ball_df(g));  // hyperbolic volume metric
  bf.base = bf.reference;
  for (int i = 0; i < g->m; ++i) {
    bf.base.potential.values[i] *= g->n + 1.0;
    bf.base.eig.A[i] *= g->n + 1.0;
    bf.base.eig.B[i] *= g->n + 1.0;
  }
  bf.omega0 = bf.reference;
  bf.fmap.assign(g->m, 0.0);
  return bf;
}

}  // namespace

TEST_CASE("limit boundary constants") {
  auto g = make_grid(2, 1.0, 8.0, 201);
  CHECK(limit_boundary_constant(domain_family(ball_df(g))) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // perturbed ball: f -> log 8 at the boundary, so the constant is log 2
  CHECK(limit_boundary_constant(domain_family(perturbed_df(g, 0.5))) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-4));
  CHECK(limit_boundary_constant(general_hyperbolic_family(g)) ==
        doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("limit equation on the ball has the trivial solution") {
  auto g = make_grid(2, 1.0, 8.0, 201);
  const KESolution sol = solve_limit(domain_family(ball_df(g)), 1e-11);
  for (double v : sol.u_inf) CHECK(std::abs(v) < 1e-10);
  CHECK(sol.residual_norm <= 1e-11);
  CHECK(!sol.residual_history.empty());
}

TEST_CASE("perturbed ball: solution matches the closed form log((rho+3)/2)") {
  // phi = rho + rho^2/2 - 3/2 cuts the same domain rho < 1, so the limit
  // metric is still complex hyperbolic and u = Phi_hyp - Phi_bar exactly.
  auto g = make_grid(2, 1.0, 8.0, 401);
  const KESolution sol = solve_limit(domain_family(perturbed_df(g, 0.5)), 1e-11);
  double worst = 0.0;
  for (int i = 0; i < g->m; ++i) {
    const double exact = std::log(0.5 * (g->rho[i] + 3.0));
    worst = std::max(worst, std::abs(sol.u_inf[i] - exact));
  }
  CHECK(worst < 10.0 * g->h * g->h);
}

TEST_CASE("volume background: constant solution 2 log 3") {
  auto g = make_grid(2, 1.0, 8.0, 201);
  const KESolution sol = solve_limit(general_hyperbolic_family(g), 1e-11);
  for (double v : sol.u_inf)
    CHECK(v == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-8));
}

TEST_CASE("warm start and tolerance guard") {
  auto g = make_grid(2, 1.0, 8.0, 201);
  const BackgroundFamily bf = domain_family(ball_df(g));
  CHECK_THROWS_AS(solve_limit(bf, 1e-13), Error);
  Field guess(g->m, 0.01);
  const KESolution sol = solve_limit(bf, 1e-11, &guess);
  for (double v : sol.u_inf) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("Einstein residual: zero for hyperbolic, order two from samples") {
  auto g = make_grid(2, 1.0, 8.0, 201);
  const RadialMetric hyp = background_metric(ball_df(g));
  // exact eigenvalues: pointwise identity, rounding only
  CHECK(ke_residual(hyp.potential, hyp.eig, 3.0, 2) < 1e-12);
  // differenced pipeline on the chart-exact potential: rounding level
  CHECK(ke_residual(hyp.potential, 3.0, 2) < 1e-8);

  // perturbed potential y + rho^2/10: not Einstein, the differenced spread
  // must converge to the exact-eigenvalue spread at second order
  auto spread = [](const GridPtr& gr, bool exact_eig) {
    RadialPotential p{gr, Field(gr->m)};
    MetricEigenvalues eig{gr, Field(gr->m), Field(gr->m)};
    for (int i = 0; i < gr->m; ++i) {
      const double r = gr->rho[i], d = 1.0 - r;
      p.values[i] = gr->y[i] + 0.1 * r * r;
      const double p1 = 1.0 / d + 0.2 * r;
      const double p2 = 1.0 / (d * d) + 0.2;
      eig.A[i] = p1;
      eig.B[i] = p1 + r * p2;
    }
    return exact_eig ? ke_residual(p, eig, 3.0, 2) : ke_residual(p, 3.0, 2);
  };
  auto fine = make_grid(2, 1.0, 8.0, 401);
  const double ec = std::abs(spread(g, false) - spread(g, true));
  const double ef = std::abs(spread(fine, false) - spread(fine, true));
  CHECK(spread(fine, true) > 0.01);  // genuinely non-Einstein
  CHECK(ec / ef > 3.0);
  CHECK(ec / ef < 5.5);
}
