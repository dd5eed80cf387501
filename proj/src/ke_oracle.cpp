#include "krf/ke_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace krf {

const RadialMetric& limit_background(const BackgroundFamily& bf) { return bf.base; }

double limit_boundary_constant(const BackgroundFamily& bf) {
  const int last = bf.omega0.potential.grid->m - 1;
  const double g_far =
      bf.fmap[last] +
      (bf.n - 1) * std::log(bf.base.eig.A[last] / bf.reference.eig.A[last]) +
      std::log(bf.base.eig.B[last] / bf.reference.eig.B[last]);
  return g_far / bf.lambda;
}

namespace {

double sup_norm(const Field& f) {
  double r = 0.0;
  for (double v : f) r = std::max(r, std::abs(v));
  return r;
}

struct Tri {
  Field lower, diag, upper;
};

void solve_tridiag(Tri& M, Field& rhs) {
  const std::size_t m = rhs.size();
  for (std::size_t i = 1; i < m; ++i) {
    const double w = M.lower[i] / M.diag[i - 1];
    M.diag[i] -= w * M.upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[m - 1] /= M.diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;)
    rhs[i] = (rhs[i] - M.upper[i] * rhs[i + 1]) / M.diag[i];
}

}  // namespace

KESolution solve_limit(const BackgroundFamily& bf, double tol,
                       const Field* initial_guess) {
  if (tol < 1e-12) throw Error("oracle tolerance below 1e-12 is not resolvable");
  const RadialGrid& g = *bf.omega0.potential.grid;
  const int m = g.m;
  const RadialMetric& base = limit_background(bf);
  const double lam = bf.lambda;
  const double u_far = limit_boundary_constant(bf);
  const double h = g.h;

  auto total_eig = [&](const Field& u) {
    MetricEigenvalues ueig = metric_eigenvalues(RadialPotential{bf.omega0.potential.grid, u});
    for (int i = 0; i < m; ++i) {
      ueig.A[i] += base.eig.A[i];
      ueig.B[i] += base.eig.B[i];
    }
    return ueig;
  };
  auto residual = [&](const Field& u, MetricEigenvalues& eig_out) {
    eig_out = total_eig(u);
    require_positive(eig_out, "solve_limit");
    Field F(m);
    for (int i = 0; i < m; ++i)
      F[i] = (bf.n - 1) * std::log(eig_out.A[i] / bf.reference.eig.A[i]) +
             std::log(eig_out.B[i] / bf.reference.eig.B[i]) + bf.fmap[i] - lam * u[i];
    F[m - 1] = u[m - 1] - u_far;
    return F;
  };

  KESolution sol;
  sol.u_inf = initial_guess ? *initial_guess : Field(m, 0.0);
  sol.u_inf[m - 1] = u_far;

  MetricEigenvalues eig;
  Field F;
  try {
    F = residual(sol.u_inf, eig);
  } catch (const NonKahlerError&) {
    // warm start outside the Kähler cone (e.g. kinked at the far clamp)
    sol.u_inf.assign(m, 0.0);
    sol.u_inf[m - 1] = u_far;
    F = residual(sol.u_inf, eig);
  }
  double fnorm = sup_norm(F);
  sol.residual_history.push_back(fnorm);

  const int max_iter = 80;
  for (int iter = 0; iter < max_iter && fnorm > tol; ++iter) {
    // Jacobian Delta_omega - lambda*Id, tridiagonal with the same stencils as
    // the parabolic solver.
    Tri J{Field(m, 0.0), Field(m, 0.0), Field(m, 0.0)};
    const double c0 = bf.n / (eig.A[0] * g.R2 * h);
    J.diag[0] = -c0 - lam;
    J.upper[0] = c0;
    for (int i = 1; i < m - 1; ++i) {
      const double s = g.drho_dy(i);
      const double cy = ((bf.n - 1) / eig.A[i] + 1.0 / eig.B[i]) / s +
                        g.rho[i] / (eig.B[i] * s * s);
      const double cyy = g.rho[i] / (eig.B[i] * s * s);
      J.lower[i] = -cy / (2.0 * h) + cyy / (h * h);
      J.diag[i] = -2.0 * cyy / (h * h) - lam;
      J.upper[i] = cy / (2.0 * h) + cyy / (h * h);
    }
    J.diag[m - 1] = 1.0;
    Field delta(m);
    for (int i = 0; i < m; ++i) delta[i] = -F[i];
    solve_tridiag(J, delta);

    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 25; ++ls) {
      Field u_trial(m);
      for (int i = 0; i < m; ++i) u_trial[i] = sol.u_inf[i] + alpha * delta[i];
      double trial_norm = std::numeric_limits<double>::infinity();
      MetricEigenvalues eig_trial;
      Field F_trial;
      try {
        F_trial = residual(u_trial, eig_trial);
        trial_norm = sup_norm(F_trial);
      } catch (const NonKahlerError&) {
      }
      if (trial_norm < fnorm) {
        sol.u_inf = std::move(u_trial);
        F = std::move(F_trial);
        eig = std::move(eig_trial);
        fnorm = trial_norm;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    ++sol.newton_iterations;
    sol.residual_history.push_back(fnorm);
    if (!accepted) break;
  }
  sol.residual_norm = fnorm;
  if (fnorm > tol) {
    std::ostringstream msg;
    msg << "limit-equation Newton stalled at residual " << fnorm << " (history:";
    for (double r : sol.residual_history) msg << " " << r;
    msg << ")";
    throw SolverFailure(msg.str());
  }
  return sol;
}

double ke_residual(const RadialPotential& metric_potential, const MetricEigenvalues& eig,
                   double lambda, int n) {
  const RadialGrid& g = *metric_potential.grid;
  const Field rp = ricci_potential_from_eigenvalues(eig, n);
  // Ric + lambda*omega = i ddbar (rp + lambda*Phi); for a radial field smooth
  // at the center that vanishes iff the combination is constant, so the
  // potential-level spread is the residual. (A further numerical i ddbar
  // would lose an order of accuracy at the stencil switch.)
  double lo = rp[0] + lambda * metric_potential.values[0], hi = lo;
  for (int i = 1; i < g.m; ++i) {
    const double v = rp[i] + lambda * metric_potential.values[i];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

double ke_residual(const RadialPotential& metric_potential, double lambda, int n) {
  return ke_residual(metric_potential, metric_eigenvalues(metric_potential), lambda, n);
}

}  // namespace krf
