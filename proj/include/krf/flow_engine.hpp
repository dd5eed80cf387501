#pragma once

#include <string>
#include <vector>

#include "krf/domain_background.hpp"

namespace krf {

struct SolverConfig {
  double dt_max = 0.01;
  double kappa = 0.1;        // step ramp: dt_k = min(dt_max, kappa*(t_k + eps))
  double newton_tol = 1e-11; // sup-norm of the backward-Euler residual
  int newton_max_iter = 30;
  double horizon = 1.0;

  void validate() const;
};

struct FlowState {
  FlowMode mode = FlowMode::Unnormalized;
  double t = 0.0;
  double eps = 0.0;
  Field u;
  Field udot;  // cached right-hand side at (t, u)
};

struct Snapshot {
  double t;
  Field u;
  Field udot;
};

struct Trajectory {
  FlowMode mode = FlowMode::Unnormalized;
  double eps = 0.0;
  std::vector<Snapshot> snapshots;
  std::string fingerprint;
  std::size_t steps = 0;
  double t_after_10_steps = 0.0;

  const Snapshot& at_time(double t, double tol = 1e-9) const;
};

// Flow right-hand side at the state's (t, eps, u). Throws NonKahlerError if
// the evolved metric loses positivity.
Field flow_rhs(const FlowState& state, const BackgroundFamily& bf);

// f + log(det base / det reference) at the far node; the constant term of the
// far-field ODE.
double boundary_far_constant(const BackgroundFamily& bf);

// Far-end Dirichlet value: exact solution of the far-field ODE
// u' = n log(lambda(s+eps)) + g_far (unnormalized), carried to the normalized
// modes through the exponential time rescaling.
double boundary_value(FlowMode mode, double t, double eps, double lambda, int n,
                      double g_far);

// One backward-Euler step of size dt, solved by damped Newton with a
// tridiagonal linearization. Throws SolverFailure on non-convergence.
FlowState flow_step(const FlowState& state, const BackgroundFamily& bf,
                    const SolverConfig& cfg, double dt);

// Advance from u = 0 at t = 0 to cfg.horizon, landing exactly on the
// requested output times. Step-halving on Newton failure, hard failure after
// 10 halvings.
Trajectory run_flow(const BackgroundFamily& bf, const SolverConfig& cfg, double eps,
                    std::vector<double> output_times);

struct ContinuationResult {
  std::vector<Trajectory> trajectories;  // one per ladder entry
  std::vector<double> deltas;            // sup |u_k - u_{k+1}| over common times
};

ContinuationResult epsilon_continuation(const BackgroundFamily& bf, const SolverConfig& cfg,
                                        const std::vector<double>& eps_ladder,
                                        const std::vector<double>& output_times);

// Eigenvalue fields of family_at(t, eps) + i ddbar u.
MetricEigenvalues total_metric_eigenvalues(const BackgroundFamily& bf, double t,
                                           double eps, const Field& u);

struct EigSnapshot {
  double t;
  MetricEigenvalues eig;
};

struct EigTrajectory {
  std::vector<EigSnapshot> snapshots;
};

// Unnormalized time s = (e^{lambda t} - 1)/lambda for normalized time t.
double unnormalized_time(double normalized_t, double lambda);

// Evaluate the unnormalized trajectory at s(t~) (snapshot hit or cubic
// interpolation in t) and scale the metric by e^{-lambda t~}.
EigTrajectory rescale_to_normalized(const Trajectory& traj, const BackgroundFamily& bf,
                                    const std::vector<double>& normalized_times);

// Relative sup distance between two eigenvalue fields.
double relative_sup_distance(const MetricEigenvalues& a, const MetricEigenvalues& b);

}  // namespace krf
