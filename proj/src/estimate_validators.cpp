#include "krf/estimate_validators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace krf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void push(EstimateReport& rep, std::string name, CheckStatus st, double margin,
          double slack, std::string detail) {
  rep.checks.push_back({std::move(name), st, margin, slack, std::move(detail)});
}

void push_na(EstimateReport& rep, const std::string& name, const std::string& why) {
  push(rep, name, CheckStatus::NotApplicable, 0.0, 0.0, why);
}

// Simpson rule on [0, t].
template <class F>
double simpson(F f, double t, int intervals = 512) {
  const double h = t / intervals;
  double s = f(0.0) + f(t);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

struct LineFit {
  double intercept = 0.0, slope = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  LineFit fit;
  if (std::abs(den) < 1e-300) {
    fit.intercept = sy / n;
  } else {
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
  }
  return fit;
}

// Smallest eigenvalue-ratio constant with ric(comp) <= -C comp; <= 0 when the
// comparison metric fails the negative-Ricci hypothesis.
double ricci_upper_bound(const RadialMetric& comp, int n) {
  const Field rp = ricci_potential_from_eigenvalues(comp.eig, n);
  const MetricEigenvalues ric =
      metric_eigenvalues(RadialPotential{comp.eig.grid, rp});
  double C = kInf;
  const int m = comp.eig.grid->m;
  for (int i = 0; i < m; ++i) {
    C = std::min(C, -ric.A[i] / comp.eig.A[i]);
    C = std::min(C, -ric.B[i] / comp.eig.B[i]);
  }
  return C;
}

}  // namespace

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not-applicable";
  }
  return "?";
}

bool EstimateReport::all_passed() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::Fail) return false;
  return true;
}

const CheckResult* EstimateReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

const std::vector<std::string>& check_manifest() {
  static const std::vector<std::string> names = {
      "c0-bracket",
      "time-derivative-upper",
      "time-derivative-lower",
      "metric-equivalence",
      "trace-bound",
      "schwarz-lemma",
      "c0-uniform",
      "time-derivative-decay",
      "time-derivative-lower-uniform",
      "metric-equivalence-uniform",
      "rescaling-consistency",
      "epsilon-cauchy",
      "ke-convergence",
      "defining-function-independence",
      "completeness",
      "curvature-asymptote",
      "cheng-yau-identity",
  };
  return names;
}

void check_apriori_unnormalized(const ValidatorContext& ctx, EstimateReport& rep) {
  static const char* names[] = {"c0-bracket",        "time-derivative-upper",
                                "time-derivative-lower", "metric-equivalence",
                                "trace-bound",       "schwarz-lemma"};
  if (!ctx.bf_unnorm || !ctx.unnorm_ladder || ctx.unnorm_ladder->trajectories.empty()) {
    for (const char* nm : names) push_na(rep, nm, "no unnormalized trajectory");
    return;
  }
  bool has_positive = false;
  for (const Trajectory& traj : ctx.unnorm_ladder->trajectories)
    for (const Snapshot& snap : traj.snapshots)
      if (snap.t > 0.0) has_positive = true;
  if (!has_positive) {
    for (const char* nm : names) push_na(rep, nm, "no positive-time snapshot");
    return;
  }
  const BackgroundFamily& bf = *ctx.bf_unnorm;
  const RadialGrid& g = *bf.omega0.potential.grid;
  const int n = bf.n, m = g.m;
  const double lam = bf.lambda, h = g.h;
  const RadialMetric& comp = bf.reference;

  // Constants of the C0 bracket: base pinched between C1r/C2r multiples of the
  // comparison metric, omega0 dominated by c of it, inf/sup of f.
  double C1r = kInf, C2r = 0.0;
  for (int i = 0; i < m; ++i) {
    C1r = std::min({C1r, bf.base.eig.A[i] / comp.eig.A[i],
                    bf.base.eig.B[i] / comp.eig.B[i]});
    C2r = std::max({C2r, bf.base.eig.A[i] / comp.eig.A[i],
                    bf.base.eig.B[i] / comp.eig.B[i]});
  }
  const double c = domination_constant(bf.omega0, comp);
  double finf = kInf, fsup = -kInf;
  for (double v : bf.fmap) {
    finf = std::min(finf, v);
    fsup = std::max(fsup, v);
  }
  rep.constants["c0.c"] = c;
  rep.constants["c0.inf_f"] = finf;
  rep.constants["c0.sup_f"] = fsup;

  const double c0_slack = 1e-10 + 5.0 * (ctx.cfg.dt_max + h * h);
  double c0_margin = kInf;
  std::string c0_worst;
  double td_upper = 0.0, td_lower = 0.0;
  double eq_min = kInf, eq_max = 0.0;
  double trace_C = -kInf;
  bool metrics_positive = true;
  std::string eq_fail_detail;

  const double schwarz_C = ricci_upper_bound(comp, n);
  rep.constants["schwarz.C"] = schwarz_C;
  double schwarz_margin = kInf;
  std::string schwarz_worst;
  bool any_window = false;

  for (const Trajectory& traj : ctx.unnorm_ladder->trajectories) {
    const double eps = traj.eps;
    const double t_min = traj.t_after_10_steps;
    for (const Snapshot& snap : traj.snapshots) {
      const double t = snap.t;
      if (t <= 0.0) continue;

      // C0 bracket, quadrature of the exact integrands.
      const double lo =
          n * simpson([&](double s) { return std::log(lam * (s + eps) * C1r); }, t) +
          t * finf;
      const double up =
          n * simpson([&](double s) { return std::log(c + lam * (s + eps) * C2r); }, t) +
          t * fsup;
      for (int i = 0; i < m; ++i) {
        const double mg = std::min(snap.u[i] - lo, up - snap.u[i]);
        if (mg < c0_margin) {
          c0_margin = mg;
          c0_worst = "eps=" + fmt(eps) + " t=" + fmt(t) + " node=" + std::to_string(i);
        }
      }

      MetricEigenvalues eig;
      try {
        eig = total_metric_eigenvalues(bf, t, eps, snap.u);
        require_positive(eig, "metric-equivalence");
      } catch (const NonKahlerError& e) {
        metrics_positive = false;
        eq_fail_detail = std::string("eps=") + fmt(eps) + " t=" + fmt(t) + ": " + e.what();
        continue;
      }

      if (t >= t_min) {
        any_window = true;
        for (int i = 0; i < m; ++i) {
          td_upper = std::max(td_upper, t * std::max(0.0, snap.udot[i] - n));
          td_lower = std::max(td_lower, std::max(0.0, n * std::log(t) - snap.udot[i]));
          const double rA = eig.A[i] / comp.eig.A[i];
          const double rB = eig.B[i] / comp.eig.B[i];
          eq_min = std::min({eq_min, rA, rB});
          eq_max = std::max({eq_max, rA, rB});
        }
        if (t <= 1.0) {
          double tr = 0.0;
          for (int i = 0; i < m; ++i)
            tr = std::max(tr, (n - 1) * comp.eig.A[i] / eig.A[i] +
                                  comp.eig.B[i] / eig.B[i]);
          trace_C = std::max(trace_C, t * std::log(tr));
        }
        if (schwarz_C > 0.0) {
          const double thr = std::pow(schwarz_C * t, n) * (1.0 - ctx.schwarz_tol);
          for (int i = 0; i < m; ++i) {
            double det_ratio = eig.B[i] / comp.eig.B[i];
            for (int k = 0; k < n - 1; ++k) det_ratio *= eig.A[i] / comp.eig.A[i];
            const double mg = det_ratio / thr - 1.0;
            if (mg < schwarz_margin) {
              schwarz_margin = mg;
              schwarz_worst =
                  "eps=" + fmt(eps) + " t=" + fmt(t) + " node=" + std::to_string(i);
            }
          }
        }
      }
    }
  }

  push(rep, "c0-bracket",
       c0_margin >= -c0_slack ? CheckStatus::Pass : CheckStatus::Fail, c0_margin,
       c0_slack,
       "worst " + c0_worst + "; c=" + fmt(c) + " f in [" + fmt(finf) + "," +
           fmt(fsup) + "]");

  if (!any_window) {
    push_na(rep, "time-derivative-upper", "no snapshot past the ramp layer");
    push_na(rep, "time-derivative-lower", "no snapshot past the ramp layer");
    push_na(rep, "metric-equivalence", "no snapshot past the ramp layer");
    push_na(rep, "trace-bound", "no snapshot past the ramp layer");
    push_na(rep, "schwarz-lemma", "no snapshot past the ramp layer");
    return;
  }

  rep.constants["time-derivative-upper.C2"] = td_upper;
  push(rep, "time-derivative-upper",
       std::isfinite(td_upper) ? CheckStatus::Pass : CheckStatus::Fail, td_upper, 0.0,
       "sup t*(udot - n)_+ = " + fmt(td_upper));
  rep.constants["time-derivative-lower.C1"] = td_lower;
  push(rep, "time-derivative-lower",
       std::isfinite(td_lower) ? CheckStatus::Pass : CheckStatus::Fail, td_lower, 0.0,
       "sup (n log t - udot)_+ = " + fmt(td_lower));

  rep.constants["metric-equivalence.C3"] = eq_min;
  rep.constants["metric-equivalence.C4"] = eq_max;
  push(rep, "metric-equivalence",
       (metrics_positive && eq_min > 0.0 && std::isfinite(eq_max)) ? CheckStatus::Pass
                                                                   : CheckStatus::Fail,
       eq_min, 0.0,
       metrics_positive
           ? "eigenvalue ratios in [" + fmt(eq_min) + "," + fmt(eq_max) + "]"
           : eq_fail_detail);

  if (trace_C == -kInf) {
    push_na(rep, "trace-bound", "no snapshot in (t_min, 1]");
  } else {
    rep.constants["trace-bound.C"] = trace_C;
    push(rep, "trace-bound",
         std::isfinite(trace_C) ? CheckStatus::Pass : CheckStatus::Fail, trace_C, 0.0,
         "sup t*log(trace) = " + fmt(trace_C));
  }

  if (schwarz_C <= 0.0) {
    push_na(rep, "schwarz-lemma",
            "comparison metric has no negative Ricci bound (C=" + fmt(schwarz_C) + ")");
  } else {
    push(rep, "schwarz-lemma",
         schwarz_margin >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail, schwarz_margin,
         ctx.schwarz_tol, "C=" + fmt(schwarz_C) + "; worst " + schwarz_worst);
  }
}

void check_apriori_normalized(const ValidatorContext& ctx, EstimateReport& rep) {
  static const char* names[] = {"c0-uniform", "time-derivative-decay",
                                "time-derivative-lower-uniform",
                                "metric-equivalence-uniform"};
  if (!ctx.bf_norm || !ctx.norm_ladder || ctx.norm_ladder->trajectories.empty()) {
    for (const char* nm : names) push_na(rep, nm, "no normalized trajectory");
    return;
  }
  const BackgroundFamily& bf = *ctx.bf_norm;
  const RadialMetric& comp = bf.reference;
  const int m = bf.omega0.potential.grid->m;
  const double lam = bf.lambda;
  const double t0 = ctx.t0;
  const double horizon = ctx.cfg.horizon;
  if (horizon < 3.0) {
    for (const char* nm : names)
      push_na(rep, nm, "horizon " + fmt(horizon) + " < 3, uniform window too short");
    return;
  }

  double c0_C = 0.0, lower_C1 = 0.0;
  double eq_min = kInf, eq_max = 0.0;
  bool positive = true;
  std::string fail_detail;
  const double floor = std::max(100.0 * ctx.cfg.newton_tol, 1e-12);
  double decay_margin = kInf;
  std::string decay_detail;
  bool decay_any_fit = false;

  for (const Trajectory& traj : ctx.norm_ladder->trajectories) {
    std::vector<double> ts, sup_pos;
    for (const Snapshot& snap : traj.snapshots) {
      const double t = snap.t;
      if (t < t0) continue;
      double vmax = 0.0;
      for (int i = 0; i < m; ++i) {
        c0_C = std::max(c0_C, std::abs(snap.u[i]));
        lower_C1 = std::max(lower_C1, std::max(0.0, -snap.udot[i]));
        vmax = std::max(vmax, snap.udot[i]);
      }
      if (vmax > floor) {
        ts.push_back(t);
        sup_pos.push_back(vmax);
      }
      try {
        const MetricEigenvalues eig = total_metric_eigenvalues(bf, t, traj.eps, snap.u);
        require_positive(eig, "metric-equivalence-uniform");
        for (int i = 0; i < m; ++i) {
          eq_min = std::min({eq_min, eig.A[i] / comp.eig.A[i], eig.B[i] / comp.eig.B[i]});
          eq_max = std::max({eq_max, eig.A[i] / comp.eig.A[i], eig.B[i] / comp.eig.B[i]});
        }
      } catch (const NonKahlerError& e) {
        positive = false;
        fail_detail = std::string("eps=") + fmt(traj.eps) + " t=" + fmt(t) + ": " + e.what();
      }
    }

    // Decay envelope for the positive part of udot.
    if (ts.size() >= 2) {
      decay_any_fit = true;
      if (is_general(bf.mode)) {
        // e^t udot <= C1 t + C2, constants by linear least squares.
        std::vector<double> gvals(ts.size());
        for (std::size_t j = 0; j < ts.size(); ++j)
          gvals[j] = std::exp(ts[j]) * sup_pos[j];
        LineFit fit = least_squares(ts, gvals);
        const double C1 = std::max(fit.slope, 0.0);
        const double C2 = std::max(fit.intercept, 0.0);
        rep.constants["decay.C1"] = C1;
        rep.constants["decay.C2"] = C2;
        for (std::size_t j = 0; j < ts.size(); ++j) {
          const double env = 1.2 * std::max(C1 * ts[j] + C2, floor);
          decay_margin = std::min(decay_margin, env / gvals[j] - 1.0);
        }
        decay_detail = "e^t udot <= C1 t + C2, C1=" + fmt(C1) + " C2=" + fmt(C2);
      } else {
        // udot <= C2 t e^{-lambda t}: fit log udot against log t - lambda t.
        std::vector<double> xs(ts.size()), ys(ts.size());
        for (std::size_t j = 0; j < ts.size(); ++j) {
          xs[j] = std::log(ts[j]) - lam * ts[j];
          ys[j] = std::log(sup_pos[j]);
        }
        LineFit fit = least_squares(xs, ys);
        rep.constants["decay.C2"] = std::exp(fit.intercept);
        rep.constants["decay.slope"] = fit.slope;
        for (std::size_t j = 0; j < ts.size(); ++j) {
          const double env = 1.2 * std::exp(fit.intercept + fit.slope * xs[j]);
          decay_margin = std::min(decay_margin, env / sup_pos[j] - 1.0);
        }
        decay_detail = "udot envelope C2 t e^{-lambda t}, C2=" +
                       fmt(std::exp(fit.intercept)) + " fitted slope " + fmt(fit.slope);
      }
    }
  }

  rep.constants["c0-uniform.C"] = c0_C;
  push(rep, "c0-uniform", std::isfinite(c0_C) ? CheckStatus::Pass : CheckStatus::Fail,
       c0_C, 0.0, "sup |u| over [t0,T] = " + fmt(c0_C));

  if (!decay_any_fit) {
    push(rep, "time-derivative-decay", CheckStatus::Pass, kInf, 0.2,
         "udot nonpositive (below floor) on the whole window");
  } else {
    push(rep, "time-derivative-decay",
         decay_margin >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail, decay_margin, 0.2,
         decay_detail);
  }

  rep.constants["time-derivative-lower-uniform.C1"] = lower_C1;
  push(rep, "time-derivative-lower-uniform",
       std::isfinite(lower_C1) ? CheckStatus::Pass : CheckStatus::Fail, lower_C1, 0.0,
       "sup (-udot)_+ over [t0,T] = " + fmt(lower_C1));

  rep.constants["metric-equivalence-uniform.C3"] =
      std::max(eq_max, eq_min > 0.0 ? 1.0 / eq_min : kInf);
  push(rep, "metric-equivalence-uniform",
       (positive && eq_min > 0.0 && std::isfinite(eq_max)) ? CheckStatus::Pass
                                                           : CheckStatus::Fail,
       eq_min, 0.0,
       positive ? "eigenvalue ratios in [" + fmt(eq_min) + "," + fmt(eq_max) + "]"
                : fail_detail);
}

void check_structural(const ValidatorContext& ctx, EstimateReport& rep) {
  const RadialGrid* g = nullptr;
  if (ctx.bf_norm) g = ctx.bf_norm->omega0.potential.grid.get();
  else if (ctx.bf_unnorm) g = ctx.bf_unnorm->omega0.potential.grid.get();

  // (a) rescaling consistency
  if (ctx.unnorm_long && ctx.bf_unnorm && ctx.bf_norm && ctx.norm_ladder &&
      !ctx.norm_ladder->trajectories.empty() && !ctx.rescale_times.empty()) {
    const Trajectory& direct = ctx.norm_ladder->trajectories.back();
    const double slack = 3.0 * (ctx.cfg.dt_max + g->h * g->h);
    const double tol = 1e-4 + slack;
    double dist = 0.0;
    std::string detail;
    CheckStatus st = CheckStatus::Pass;
    try {
      const EigTrajectory resc =
          rescale_to_normalized(*ctx.unnorm_long, *ctx.bf_unnorm, ctx.rescale_times);
      for (std::size_t j = 0; j < ctx.rescale_times.size(); ++j) {
        const double t = ctx.rescale_times[j];
        const Snapshot& snap = direct.at_time(t);
        const MetricEigenvalues deig =
            total_metric_eigenvalues(*ctx.bf_norm, t, direct.eps, snap.u);
        dist = std::max(dist, relative_sup_distance(resc.snapshots[j].eig, deig));
      }
      st = dist <= tol ? CheckStatus::Pass : CheckStatus::Fail;
      detail = "max relative eigenvalue distance " + fmt(dist) + " at " +
               std::to_string(ctx.rescale_times.size()) + " matched times";
      rep.constants["rescaling.distance"] = dist;
    } catch (const Error& e) {
      st = CheckStatus::Fail;
      detail = e.what();
      dist = kInf;
    }
    push(rep, "rescaling-consistency", st, tol - dist, slack, detail);
  } else {
    push_na(rep, "rescaling-consistency", "needs both solvers and matched times");
  }

  // (b) epsilon-Cauchy
  const ContinuationResult* ladder =
      ctx.unnorm_ladder && ctx.unnorm_ladder->deltas.size() >= 2 ? ctx.unnorm_ladder
      : ctx.norm_ladder && ctx.norm_ladder->deltas.size() >= 2   ? ctx.norm_ladder
                                                                 : nullptr;
  if (ladder) {
    double dmin = kInf;
    for (double d : ladder->deltas) dmin = std::min(dmin, d);
    if (dmin < 1e-14) {
      push_na(rep, "epsilon-cauchy", "ladder deltas at the rounding floor");
    } else {
      double margin = kInf;
      std::ostringstream ds;
      for (std::size_t k = 0; k < ladder->deltas.size(); ++k) {
        if (k) margin = std::min(margin, ladder->deltas[k - 1] / ladder->deltas[k] - 1.0);
        ds << (k ? " " : "") << ladder->deltas[k];
      }
      push(rep, "epsilon-cauchy", margin > 0.0 ? CheckStatus::Pass : CheckStatus::Fail,
           margin, 0.0, "deltas: " + ds.str());
    }
  } else {
    push_na(rep, "epsilon-cauchy", "ladder too short for a Cauchy check");
  }

  // (c) KE convergence of the normalized flow against the elliptic oracle
  if (ctx.oracle && ctx.bf_norm && ctx.norm_ladder &&
      !ctx.norm_ladder->trajectories.empty() &&
      ctx.norm_ladder->trajectories.back().snapshots.back().t >= 3.0 - 1e-9) {
    const BackgroundFamily& bf = *ctx.bf_norm;
    const Trajectory& traj = ctx.norm_ladder->trajectories.back();
    const Snapshot& last = traj.snapshots.back();
    MetricEigenvalues oe = metric_eigenvalues(
        RadialPotential{bf.omega0.potential.grid, ctx.oracle->u_inf});
    for (int i = 0; i < g->m; ++i) {
      oe.A[i] += bf.base.eig.A[i];
      oe.B[i] += bf.base.eig.B[i];
    }
    const MetricEigenvalues fe = total_metric_eigenvalues(bf, last.t, traj.eps, last.u);
    const double dist = relative_sup_distance(fe, oe);
    rep.constants["ke.distance"] = dist;
    const double du0 = std::abs(last.u[0] - ctx.oracle->u_inf[0]);
    push(rep, "ke-convergence", dist <= 1e-3 ? CheckStatus::Pass : CheckStatus::Fail,
         1e-3 - dist, 0.0,
         "relative eigenvalue distance " + fmt(dist) + " at t=" + fmt(last.t) +
             "; center |u - u_inf| = " + fmt(du0));
  } else {
    push_na(rep, "ke-convergence", "needs the oracle and a normalized run to t >= 3");
  }

  // (d) defining-function independence of the limit metric
  if (ctx.oracle && ctx.oracle_alt && ctx.bf_norm && ctx.bf_alt &&
      !is_general(ctx.bf_norm->mode)) {
    MetricEigenvalues e1 = metric_eigenvalues(
        RadialPotential{ctx.bf_norm->omega0.potential.grid, ctx.oracle->u_inf});
    MetricEigenvalues e2 = metric_eigenvalues(
        RadialPotential{ctx.bf_alt->omega0.potential.grid, ctx.oracle_alt->u_inf});
    for (int i = 0; i < g->m; ++i) {
      e1.A[i] += ctx.bf_norm->base.eig.A[i];
      e1.B[i] += ctx.bf_norm->base.eig.B[i];
      e2.A[i] += ctx.bf_alt->base.eig.A[i];
      e2.B[i] += ctx.bf_alt->base.eig.B[i];
    }
    const double dist = relative_sup_distance(e1, e2);
    rep.constants["df-independence.distance"] = dist;
    push(rep, "defining-function-independence",
         dist <= 1e-3 ? CheckStatus::Pass : CheckStatus::Fail, 1e-3 - dist, 0.0,
         "limit metrics of the two defining presets differ by " + fmt(dist));
  } else {
    push_na(rep, "defining-function-independence",
            "needs two defining presets of the same domain");
  }
}

double completeness_slope(const MetricEigenvalues& eig) {
  const RadialGrid& g = *eig.grid;
  const Field profile = geodesic_length_profile(eig);
  std::vector<double> xs, ys;
  for (int i = g.m / 2; i < g.m; ++i) {
    xs.push_back(g.y[i]);
    ys.push_back(profile[i]);
  }
  return least_squares(xs, ys).slope;
}

void check_geometry(const ValidatorContext& ctx, EstimateReport& rep) {
  const BackgroundFamily* bf = nullptr;
  const ContinuationResult* ladder = nullptr;
  if (ctx.bf_norm && ctx.norm_ladder && !ctx.norm_ladder->trajectories.empty()) {
    bf = ctx.bf_norm;
    ladder = ctx.norm_ladder;
  } else if (ctx.bf_unnorm && ctx.unnorm_ladder && !ctx.unnorm_ladder->trajectories.empty()) {
    bf = ctx.bf_unnorm;
    ladder = ctx.unnorm_ladder;
  }

  // (a) completeness
  if (bf) {
    const Trajectory& traj = ladder->trajectories.back();
    const double threshold = 0.01;
    double margin = kInf;
    std::ostringstream detail;
    bool ok = true;
    for (const Snapshot& snap : traj.snapshots) {
      const MetricEigenvalues eig =
          total_metric_eigenvalues(*bf, snap.t, traj.eps, snap.u);
      const double slope = completeness_slope(eig);
      if (snap.t <= 0.0) {
        detail << "t=0 slope " << fmt(slope)
               << (slope < threshold ? " (incomplete)" : " (complete)") << "; ";
      } else {
        margin = std::min(margin, slope - threshold);
        if (slope <= threshold) {
          ok = false;
          detail << "t=" << fmt(snap.t) << " slope " << fmt(slope) << " not positive; ";
        }
      }
    }
    if (margin == kInf) {
      push_na(rep, "completeness", "no positive-time snapshot");
    } else {
      rep.constants["completeness.final_slope"] = margin + 0.01;
      push(rep, "completeness", ok ? CheckStatus::Pass : CheckStatus::Fail, margin, 0.01,
           detail.str() + "positive length-profile slope at every t > 0");
    }
  } else {
    push_na(rep, "completeness", "no trajectory");
  }

  // (b) curvature asymptote, domain modes with n >= 2 only: the flow metric
  // approaches a multiple of omega-bar near the boundary, so the base
  // coefficient times H_mix tends to -1.
  if (bf && !is_general(bf->mode) && bf->n >= 2) {
    const RadialGrid& g = *bf->omega0.potential.grid;
    const int i0 = static_cast<int>(0.9 * (g.m - 1));
    const int i1 = g.m - 4;
    double maxdev = 0.0;
    // omega0 + omega-bar, exact eigenvalue sum
    MetricEigenvalues sum{bf->omega0.eig.grid, bf->omega0.eig.A, bf->omega0.eig.B};
    for (int i = 0; i < g.m; ++i) {
      sum.A[i] += bf->base.eig.A[i];
      sum.B[i] += bf->base.eig.B[i];
    }
    const CurvatureComponents H0 = curvature_from_eigenvalues(sum, bf->n);
    for (int i = i0; i <= i1; ++i)
      maxdev = std::max(maxdev, std::abs(H0.H_mix[i] + 1.0));
    // flow metric, scale-corrected by the base coefficient
    const Trajectory& traj = ladder->trajectories.back();
    for (const Snapshot& snap : traj.snapshots) {
      if (snap.t < ctx.t0) continue;
      const double ab = family_coefficients(*bf, snap.t, traj.eps).ab;
      const MetricEigenvalues eig =
          total_metric_eigenvalues(*bf, snap.t, traj.eps, snap.u);
      const CurvatureComponents H = curvature_from_eigenvalues(eig, bf->n);
      for (int i = i0; i <= i1; ++i)
        maxdev = std::max(maxdev, std::abs(ab * H.H_mix[i] + 1.0));
    }
    rep.constants["curvature.max_dev"] = maxdev;
    push(rep, "curvature-asymptote",
         maxdev <= 0.05 ? CheckStatus::Pass : CheckStatus::Fail, 0.05 - maxdev, 0.05,
         "max |H_mix + 1| over the last node decade = " + fmt(maxdev));
  } else {
    push_na(rep, "curvature-asymptote",
            bf && bf->n < 2 ? "no mixed direction for n = 1"
                            : "no domain background to compare against");
  }

  // (c) background identity residual
  if (ctx.df && bf && !is_general(bf->mode)) {
    const double h = ctx.df->grid->h;
    const double res = cy_identity_residual(*ctx.df, bf->n);
    rep.constants["cheng-yau.residual"] = res;
    push(rep, "cheng-yau-identity",
         res <= 5.0 * h * h ? CheckStatus::Pass : CheckStatus::Fail, 5.0 * h * h - res,
         5.0 * h * h, "residual " + fmt(res) + " vs 5h^2 = " + fmt(5.0 * h * h));
  } else {
    push_na(rep, "cheng-yau-identity", "no defining function in this mode");
  }
}

EstimateReport run_checks(const ValidatorContext& ctx) {
  EstimateReport rep;
  check_apriori_unnormalized(ctx, rep);
  check_apriori_normalized(ctx, rep);
  check_structural(ctx, rep);
  check_geometry(ctx, rep);
  return rep;
}

}  // namespace krf
