#include "krf/flow_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace krf {

void SolverConfig::validate() const {
  if (!(dt_max > 0.0) || !(kappa > 0.0) || !(newton_tol > 0.0) || newton_max_iter < 1 ||
      horizon < 0.0)
    throw Error("invalid solver configuration");
  if (newton_tol < 1e-13) throw Error("newton_tol below 1e-13 is not resolvable");
}

const Snapshot& Trajectory::at_time(double t, double tol) const {
  for (const Snapshot& s : snapshots)
    if (std::abs(s.t - t) <= tol * std::max(1.0, std::abs(t))) return s;
  throw Error("no snapshot at t = " + std::to_string(t));
}

namespace {

struct Tridiag {
  Field lower, diag, upper;  // lower[0] and upper[m-1] unused
};

// Thomas algorithm; overwrites rhs with the solution.
void solve_tridiag(Tridiag& M, Field& rhs) {
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

double sup_norm(const Field& f) {
  double r = 0.0;
  for (double v : f) r = std::max(r, std::abs(v));
  return r;
}

// Tridiagonal matrix of the radial Laplacian at the given metric, with a
// first-order one-sided stencil for the center limit and an identity row at
// the far end (Dirichlet).
Tridiag laplacian_matrix(const MetricEigenvalues& eig, int n) {
  const RadialGrid& g = *eig.grid;
  const int m = g.m;
  Tridiag L{Field(m, 0.0), Field(m, 0.0), Field(m, 0.0)};
  const double h = g.h;
  // center: n v'(0)/A(0) with v'(0) ~ (v1 - v0)/(h * R2)
  const double c0 = n / (eig.A[0] * g.R2 * h);
  L.diag[0] = -c0;
  L.upper[0] = c0;
  for (int i = 1; i < m - 1; ++i) {
    const double s = g.drho_dy(i);
    const double cy = ((n - 1) / eig.A[i] + 1.0 / eig.B[i]) / s +
                      g.rho[i] / (eig.B[i] * s * s);
    const double cyy = g.rho[i] / (eig.B[i] * s * s);
    L.lower[i] = -cy / (2.0 * h) + cyy / (h * h);
    L.diag[i] = -2.0 * cyy / (h * h);
    L.upper[i] = cy / (2.0 * h) + cyy / (h * h);
  }
  return L;
}

}  // namespace

Field flow_rhs(const FlowState& state, const BackgroundFamily& bf) {
  const RadialGrid& g = *bf.omega0.potential.grid;
  const MetricEigenvalues eig = total_metric_eigenvalues(bf, state.t, state.eps, state.u);
  require_positive(eig, "flow_rhs");
  const RadialMetric& ref = bf.reference;
  const double lam0 = bf.zeroth_order();
  Field r(g.m);
  for (int i = 0; i < g.m; ++i) {
    r[i] = (bf.n - 1) * std::log(eig.A[i] / ref.eig.A[i]) +
           std::log(eig.B[i] / ref.eig.B[i]) + bf.fmap[i] - lam0 * state.u[i];
  }
  return r;
}

double boundary_far_constant(const BackgroundFamily& bf) {
  const int last = bf.omega0.potential.grid->m - 1;
  return bf.fmap[last] +
         (bf.n - 1) * std::log(bf.base.eig.A[last] / bf.reference.eig.A[last]) +
         std::log(bf.base.eig.B[last] / bf.reference.eig.B[last]);
}

namespace {

// closed form of n \int_0^s log(lambda(r+eps)) dr + s*g_far
double unnormalized_boundary(double s, double eps, double lambda, int n, double g_far) {
  if (s <= 0.0) return 0.0;
  const double head = (s + eps) * (std::log(lambda * (s + eps)) - 1.0);
  const double tail = eps > 0.0 ? eps * (std::log(lambda * eps) - 1.0) : 0.0;
  return n * (head - tail) + s * g_far;
}

}  // namespace

double boundary_value(FlowMode mode, double t, double eps, double lambda, int n,
                      double g_far) {
  if (t < 0.0) throw Error("negative time");
  if (!is_normalized(mode)) return unnormalized_boundary(t, eps, lambda, n, g_far);
  // Normalized value from the unnormalized one through the rescaling
  // u~(t) = e^{-lambda t} u(s) - n t + (n/lambda)(1 - e^{-lambda t}),
  // s = (e^{lambda t} - 1)/lambda; the additive term absorbs the volume
  // scaling of the determinant ratio.
  const double decay = std::exp(-lambda * t);
  const double s = (1.0 / decay - 1.0) / lambda;
  return decay * unnormalized_boundary(s, eps, lambda, n, g_far) - n * t +
         (n / lambda) * (1.0 - decay);
}

MetricEigenvalues total_metric_eigenvalues(const BackgroundFamily& bf, double t,
                                           double eps, const Field& u) {
  const RadialMetric fam = family_at(bf, t, eps);
  const MetricEigenvalues ueig =
      metric_eigenvalues(RadialPotential{bf.omega0.potential.grid, u});
  MetricEigenvalues out = fam.eig;
  for (std::size_t i = 0; i < out.A.size(); ++i) {
    out.A[i] += ueig.A[i];
    out.B[i] += ueig.B[i];
  }
  return out;
}

FlowState flow_step(const FlowState& state, const BackgroundFamily& bf,
                    const SolverConfig& cfg, double dt) {
  const RadialGrid& g = *bf.omega0.potential.grid;
  const int m = g.m;
  const double t_next = state.t + dt;
  const double lam0 = bf.zeroth_order();
  const double bdry =
      boundary_value(state.mode, t_next, state.eps, bf.lambda, bf.n,
                     boundary_far_constant(bf));

  FlowState trial = state;
  trial.t = t_next;

  auto residual = [&](const Field& v, Field& out_rhs) -> Field {
    FlowState probe = trial;
    probe.u = v;
    out_rhs = flow_rhs(probe, bf);
    Field G(m);
    for (int i = 0; i < m - 1; ++i) G[i] = v[i] - state.u[i] - dt * out_rhs[i];
    G[m - 1] = v[m - 1] - bdry;
    return G;
  };

  // warm start along the cached slope
  Field v(m);
  for (int i = 0; i < m; ++i) v[i] = state.u[i] + dt * state.udot[i];
  v[m - 1] = bdry;

  Field rhs_v;
  Field G;
  try {
    G = residual(v, rhs_v);
  } catch (const NonKahlerError&) {
    v = state.u;
    v[m - 1] = bdry;
    G = residual(v, rhs_v);
  }
  double gnorm = sup_norm(G);

  for (int iter = 0; iter < cfg.newton_max_iter; ++iter) {
    if (gnorm <= cfg.newton_tol) {
      FlowState next = trial;
      next.u = v;
      next.udot = rhs_v;
      return next;
    }
    const MetricEigenvalues eig = total_metric_eigenvalues(bf, t_next, state.eps, v);
    Tridiag L = laplacian_matrix(eig, bf.n);
    Tridiag J{Field(m), Field(m), Field(m)};
    for (int i = 0; i < m - 1; ++i) {
      J.lower[i] = -dt * L.lower[i];
      J.diag[i] = 1.0 + dt * lam0 - dt * L.diag[i];
      J.upper[i] = -dt * L.upper[i];
    }
    J.lower[m - 1] = 0.0;
    J.diag[m - 1] = 1.0;
    J.upper[m - 1] = 0.0;
    Field delta(m);
    for (int i = 0; i < m; ++i) delta[i] = -G[i];
    solve_tridiag(J, delta);

    // halving line search on the residual norm
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 25; ++ls) {
      Field v_trial(m);
      for (int i = 0; i < m; ++i) v_trial[i] = v[i] + alpha * delta[i];
      double trial_norm = std::numeric_limits<double>::infinity();
      Field rhs_trial, G_trial;
      try {
        G_trial = residual(v_trial, rhs_trial);
        trial_norm = sup_norm(G_trial);
      } catch (const NonKahlerError&) {
        // outside the Kähler cone; keep damping
      }
      if (trial_norm < gnorm) {
        v = std::move(v_trial);
        G = std::move(G_trial);
        rhs_v = std::move(rhs_trial);
        gnorm = trial_norm;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }
  if (gnorm <= cfg.newton_tol) {
    FlowState next = trial;
    next.u = v;
    next.udot = rhs_v;
    return next;
  }
  std::ostringstream msg;
  msg << "Newton did not converge: t = " << state.t << ", dt = " << dt
      << ", eps = " << state.eps << ", residual = " << gnorm;
  throw SolverFailure(msg.str());
}

Trajectory run_flow(const BackgroundFamily& bf, const SolverConfig& cfg, double eps,
                    std::vector<double> output_times) {
  cfg.validate();
  if (eps < 0.0) throw Error("negative regularization");
  const RadialGrid& g = *bf.omega0.potential.grid;

  std::sort(output_times.begin(), output_times.end());
  output_times.erase(std::unique(output_times.begin(), output_times.end()),
                     output_times.end());
  for (double t : output_times)
    if (t < 0.0 || t > cfg.horizon + 1e-12)
      throw Error("output time outside [0, horizon]");

  Trajectory traj;
  traj.mode = bf.mode;
  traj.eps = eps;

  FlowState state;
  state.mode = bf.mode;
  state.eps = eps;
  state.u.assign(g.m, 0.0);
  state.udot = flow_rhs(state, bf);

  auto record = [&](const FlowState& s) {
    traj.snapshots.push_back({s.t, s.u, s.udot});
  };
  record(state);  // t = 0, u = 0

  const double tol = 1e-12;
  std::size_t next_out = 0;
  while (next_out < output_times.size() && output_times[next_out] <= tol) ++next_out;

  while (state.t < cfg.horizon - tol) {
    double dt = std::min(cfg.dt_max, cfg.kappa * (state.t + eps));
    if (!(dt > 0.0)) throw SolverFailure("step size underflow (eps = 0 at t = 0?)");
    double target = cfg.horizon;
    if (next_out < output_times.size()) target = std::min(target, output_times[next_out]);
    dt = std::min(dt, target - state.t);

    bool stepped = false;
    for (int halving = 0; halving <= 10; ++halving) {
      try {
        state = flow_step(state, bf, cfg, dt);
        stepped = true;
        break;
      } catch (const SolverFailure&) {
        if (halving == 10) throw;
        dt *= 0.5;
      }
    }
    if (!stepped) throw SolverFailure("step failed");  // unreachable
    ++traj.steps;
    if (traj.steps == 10) traj.t_after_10_steps = state.t;

    if (next_out < output_times.size() &&
        std::abs(state.t - output_times[next_out]) <= tol * std::max(1.0, state.t)) {
      record(state);
      ++next_out;
    }
  }
  return traj;
}

ContinuationResult epsilon_continuation(const BackgroundFamily& bf, const SolverConfig& cfg,
                                        const std::vector<double>& eps_ladder,
                                        const std::vector<double>& output_times) {
  if (eps_ladder.empty()) throw Error("empty eps ladder");
  for (std::size_t k = 0; k < eps_ladder.size(); ++k) {
    if (!(eps_ladder[k] > 0.0)) throw Error("eps ladder entries must be positive");
    if (k > 0 && !(eps_ladder[k] < eps_ladder[k - 1]))
      throw Error("eps ladder must be strictly decreasing");
  }
  ContinuationResult res;
  for (double eps : eps_ladder)
    res.trajectories.push_back(run_flow(bf, cfg, eps, output_times));
  for (std::size_t k = 0; k + 1 < res.trajectories.size(); ++k) {
    const Trajectory& a = res.trajectories[k];
    const Trajectory& b = res.trajectories[k + 1];
    double d = 0.0;
    const std::size_t ns = std::min(a.snapshots.size(), b.snapshots.size());
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t i = 0; i < a.snapshots[s].u.size(); ++i)
        d = std::max(d, std::abs(a.snapshots[s].u[i] - b.snapshots[s].u[i]));
    res.deltas.push_back(d);
  }
  return res;
}

double unnormalized_time(double normalized_t, double lambda) {
  return std::expm1(lambda * normalized_t) / lambda;
}

EigTrajectory rescale_to_normalized(const Trajectory& traj, const BackgroundFamily& bf,
                                    const std::vector<double>& normalized_times) {
  if (is_normalized(traj.mode))
    throw Error("rescale_to_normalized expects an unnormalized trajectory");
  if (traj.snapshots.empty()) throw Error("empty trajectory");
  EigTrajectory out;
  for (double tn : normalized_times) {
    const double s = unnormalized_time(tn, bf.lambda);
    const double last_t = traj.snapshots.back().t;
    if (s > last_t * (1.0 + 1e-9) + 1e-12)
      throw Error("normalized time " + std::to_string(tn) +
                  " maps beyond the unnormalized horizon");
    Field u;
    bool exact = false;
    for (const Snapshot& snap : traj.snapshots) {
      if (std::abs(snap.t - s) <= 1e-9 * std::max(1.0, s)) {
        u = snap.u;
        exact = true;
        break;
      }
    }
    if (!exact) {
      // cubic Lagrange interpolation on the four nearest snapshots
      if (traj.snapshots.size() < 4)
        throw Error("too few snapshots for cubic interpolation");
      std::size_t j = 0;
      while (j + 1 < traj.snapshots.size() && traj.snapshots[j + 1].t < s) ++j;
      std::size_t lo = j >= 1 ? j - 1 : 0;
      lo = std::min(lo, traj.snapshots.size() - 4);
      const std::size_t mnodes = traj.snapshots[0].u.size();
      u.assign(mnodes, 0.0);
      for (std::size_t a = 0; a < 4; ++a) {
        double w = 1.0;
        for (std::size_t b = 0; b < 4; ++b) {
          if (a == b) continue;
          w *= (s - traj.snapshots[lo + b].t) /
               (traj.snapshots[lo + a].t - traj.snapshots[lo + b].t);
        }
        for (std::size_t i = 0; i < mnodes; ++i) u[i] += w * traj.snapshots[lo + a].u[i];
      }
    }
    MetricEigenvalues eig = total_metric_eigenvalues(bf, s, traj.eps, u);
    const double scale = std::exp(-bf.lambda * tn);
    for (std::size_t i = 0; i < eig.A.size(); ++i) {
      eig.A[i] *= scale;
      eig.B[i] *= scale;
    }
    out.snapshots.push_back({tn, std::move(eig)});
  }
  return out;
}

double relative_sup_distance(const MetricEigenvalues& a, const MetricEigenvalues& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.A.size(); ++i) {
    const double da = std::abs(a.A[i] - b.A[i]) /
                      (0.5 * (std::abs(a.A[i]) + std::abs(b.A[i])) + 1e-300);
    const double db = std::abs(a.B[i] - b.B[i]) /
                      (0.5 * (std::abs(a.B[i]) + std::abs(b.B[i])) + 1e-300);
    r = std::max(r, std::max(da, db));
  }
  return r;
}

}  // namespace krf
