#include "chcontrol/verify.hpp"

#include "chcontrol/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chc {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kOperatorTol = 1e-12;
constexpr double kControlOdeTol = 1e-13;
constexpr double kEnergySlack = 1e-12;
constexpr double kTaylor1Lo = 1.9, kTaylor1Hi = 2.1;
constexpr double kTaylor2Lo = 2.85, kTaylor2Hi = 3.15;
constexpr double kGradientTol = 1e-3;
constexpr double kRefinementFactor = 1.8;
constexpr double kSecondFormTol = 1e-2;
constexpr double kSecondFormSymTol = 1e-10;
constexpr double kSparsityMargin = 1e-5;
constexpr double kConvergedKkt = 1e-6;
constexpr double kCoercivityMargin = 0.10;

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

double fit_slope(const std::vector<double>& eps, const std::vector<double>& err) {
  // least-squares slope of log err vs log eps
  const size_t n = eps.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(eps[i]);
    const double y = std::log(std::max(err[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Space {
  BasisPtr basis;
  std::vector<double> times;
  PhysicsParams physics;
};

Space make_space(const ProblemConfig& cfg) {
  return Space{cfg.make_basis(), cfg.make_times(), cfg.make_physics()};
}

// smooth deterministic profiles used by several checks
SpaceTimeField analytic_control(const Space& sp, double amplitude) {
  const double length = sp.basis->length(0);
  const double t_final = sp.times.back();
  return SpaceTimeField::from_function(
      sp.basis, sp.times, [length, t_final, amplitude](double x, double y, double t) {
        const double pi = 3.14159265358979323846;
        (void)y;
        return amplitude * std::cos(pi * x / length) * std::sin(pi * t / t_final);
      });
}

Field smooth_initial_state(const Space& sp) {
  const double length = sp.basis->length(0);
  return Field::from_function(sp.basis, [length](double x, double y) {
    const double pi = 3.14159265358979323846;
    (void)y;
    return 0.8 + 0.05 * std::cos(pi * x / length);
  });
}

double max_abs_nodal(const SpaceTimeField& f) {
  double mx = 0.0;
  for (int m = 0; m < f.num_steps(); ++m) {
    mx = std::max(mx, f.basis()->synthesize(f.frame(m)).cwiseAbs().maxCoeff());
  }
  return mx;
}

// smooth space-time target used by the derivative-consistency checks
CostConfig derivative_check_cost(const Space& sp, double b3) {
  CostConfig cost;
  cost.b1 = 1.0;
  cost.b2 = 1.0;
  cost.b3 = b3;
  cost.kappa = 0.0;
  cost.bounds.lower_value = -1e6;
  cost.bounds.upper_value = 1e6;
  const double length = sp.basis->length(0);
  const double t_final = sp.times.back();
  cost.phi_q = SpaceTimeField::from_function(
      sp.basis, sp.times, [length, t_final](double x, double y, double t) {
        const double pi = 3.14159265358979323846;
        (void)y;
        return 0.7 + 0.2 * std::cos(pi * x / length) * (0.5 + 0.5 * t / t_final);
      });
  cost.phi_omega = Field::from_function(sp.basis, [length](double x, double y) {
    const double pi = 3.14159265358979323846;
    (void)y;
    return 0.7 + 0.1 * std::cos(2.0 * pi * x / length);
  });
  return cost;
}

}  // namespace

std::vector<CheckResult> check_mass_conservation(const ProblemConfig& cfg) {
  const Space sp = make_space(cfg);
  Rng rng(cfg.seed + 101);
  double worst = 0.0;
  for (int run = 0; run < 10; ++run) {
    const SpaceTimeField u = random_control(sp.basis, sp.times, rng, 1.0, 8);
    Field phi0 = random_field(sp.basis, rng, 0.4, sp.basis->num_modes() / 3);
    phi0 += Field::constant(sp.basis, rng.uniform(-0.5, 0.5));
    const Field w0 = random_field(sp.basis, rng, 0.3, 8);
    const StateTrajectory traj = solve_state(u, phi0, w0, sp.physics);
    const double m0 = mean(phi0);
    for (int m = 0; m <= traj.num_steps(); ++m) {
      worst = std::max(worst, std::abs(mean(traj.phi_field(m)) - m0));
    }
  }
  return {{"mass-conservation", worst <= kMassTol, worst, "max |mean(phi)-m0| over 10 runs"}};
}

std::vector<CheckResult> check_operator_identities(const ProblemConfig& cfg) {
  const Space sp = make_space(cfg);
  Rng rng(cfg.seed + 202);
  double worst_inv = 0.0;
  double worst_sym = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Field f = random_field(sp.basis, rng, 1.0, -1, /*zero_mean=*/true);
    const Field g = random_field(sp.basis, rng, 1.0, -1, /*zero_mean=*/true);
    const Field back = laplacian(inv_neumann_laplacian(f));
    worst_inv = std::max(worst_inv, norm_h(back + f) / norm_h(f));
    const double a = inner(f, inv_neumann_laplacian(g));
    const double b = inner(g, inv_neumann_laplacian(f));
    worst_sym = std::max(worst_sym, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-30}));
  }
  return {
      {"inverse-laplacian-identity", worst_inv <= kOperatorTol, worst_inv,
       "max rel |lap(N f) + f| over 100 zero-mean fields"},
      {"inverse-laplacian-symmetry", worst_sym <= kOperatorTol, worst_sym,
       "max rel |<f,Ng> - <g,Nf>| over 100 pairs"},
  };
}

std::vector<CheckResult> check_control_ode(const ProblemConfig& cfg) {
  const Space sp = make_space(cfg);
  std::vector<CheckResult> out;
  {
    // unit relaxation: w' + w = 1 from rest reaches 1 - exp(-1) at t = 1
    const auto times = uniform_time_grid(1.0, cfg.steps);
    const SpaceTimeField u = SpaceTimeField::constant(sp.basis, times, 1.0);
    const SpaceTimeField w = solve_control_ode(u, Field(sp.basis), 1.0);
    const double got = mean(w.frame_field(w.num_frames() - 1));
    const double err = std::abs(got - (1.0 - std::exp(-1.0)));
    out.push_back({"control-ode-unit-response", err <= kControlOdeTol, err,
                   "|w(1) - (1 - 1/e)| for unit forcing"});
  }
  {
    // random piecewise-constant forcing against the closed-form convolution
    Rng rng(cfg.seed + 303);
    const SpaceTimeField u = random_control(sp.basis, sp.times, rng, 1.0, 8);
    const Field w0 = random_field(sp.basis, rng, 0.5, 8);
    const SpaceTimeField w = solve_control_ode(u, w0, cfg.gamma);
    double worst = 0.0;
    for (int m = 0; m < w.num_frames(); ++m) {
      const double t_m = sp.times[static_cast<size_t>(m)];
      Eigen::VectorXd expect = std::exp(-t_m / cfg.gamma) * w0.coeffs();
      for (int j = 0; j < m; ++j) {
        const double a = std::exp(-(t_m - sp.times[static_cast<size_t>(j) + 1]) / cfg.gamma);
        const double b = std::exp(-(t_m - sp.times[static_cast<size_t>(j)]) / cfg.gamma);
        expect += (a - b) * u.frame(j);
      }
      const double scale = std::max(expect.norm(), 1.0);
      worst = std::max(worst, (w.frame(m) - expect).norm() / scale);
    }
    out.push_back({"control-ode-exactness", worst <= kControlOdeTol, worst,
                   "max rel deviation from the closed-form response"});
  }
  return out;
}

std::vector<CheckResult> check_energy_dissipation(const ProblemConfig& cfg) {
  const Space sp = make_space(cfg);
  Rng rng(cfg.seed + 404);
  const Field phi0 = random_field(sp.basis, rng, 0.1, sp.basis->num_modes() / 4);
  const SpaceTimeField u(sp.basis, sp.times);
  const StateTrajectory traj = solve_state(u, phi0, Field(sp.basis), sp.physics);
  double prev = free_energy(traj.phi_field(0), sp.physics.potential);
  double worst_increase = 0.0;
  for (int m = 1; m <= traj.num_steps(); ++m) {
    const double e = free_energy(traj.phi_field(m), sp.physics.potential);
    worst_increase = std::max(worst_increase, e - prev);
    prev = e;
  }
  const double slack = kEnergySlack * std::max(1.0, std::abs(prev));
  return {{"energy-dissipation", worst_increase <= slack, worst_increase,
           "max per-step free-energy increase, uncontrolled run"}};
}

namespace {

struct TaylorSetup {
  StateTrajectory traj;
  SpaceTimeField u;
  SpaceTimeField h;
  Field phi0;
  Field w0;
};

TaylorSetup taylor_setup(const Space& sp, Rng& rng) {
  TaylorSetup ts;
  ts.u = random_control(sp.basis, sp.times, rng, 0.5, 8);
  ts.h = random_control(sp.basis, sp.times, rng, 1.0, 8);
  ts.phi0 = random_field(sp.basis, rng, 0.15, 6);
  ts.phi0 += Field::constant(sp.basis, 0.2);
  ts.w0 = random_field(sp.basis, rng, 0.1, 6);
  ts.traj = solve_state(ts.u, ts.phi0, ts.w0, sp.physics);
  return ts;
}

double linf_h_distance(const StateTrajectory& a, const std::vector<Eigen::VectorXd>& b) {
  double mx = 0.0;
  for (size_t m = 0; m < a.phi.size(); ++m) mx = std::max(mx, (a.phi[m] - b[m]).norm());
  return mx;
}

}  // namespace

std::vector<CheckResult> check_taylor_first(const ProblemConfig& cfg) {
  const Space sp = make_space(cfg);
  Rng rng(cfg.seed + 505);
  std::vector<CheckResult> out;
  for (int trial = 0; trial < 2; ++trial) {
    const TaylorSetup ts = taylor_setup(sp, rng);
    const TangentTrajectory xi = solve_linearized(ts.traj, ts.h);
    std::vector<double> epses{1e-1, 1e-2, 1e-3, 1e-4};
    std::vector<double> errs;
    for (const double eps : epses) {
      SpaceTimeField u_eps = ts.u;
      u_eps += eps * ts.h;
      const StateTrajectory pert = solve_state(u_eps, ts.phi0, ts.w0, sp.physics);
      std::vector<Eigen::VectorXd> predict(ts.traj.phi.size());
      for (size_t m = 0; m < predict.size(); ++m) predict[m] = ts.traj.phi[m] + eps * xi.xi[m];
      errs.push_back(linf_h_distance(pert, predict));
    }
    const double slope = fit_slope(epses, errs);
    out.push_back({"taylor-first-order-slope-" + std::to_string(trial),
                   slope >= kTaylor1Lo && slope <= kTaylor1Hi, slope,
                   "remainder slope, errors " + fmt(errs.front()) + " .. " + fmt(errs.back())});
  }
  return out;
}

std::vector<CheckResult> check_taylor_second(const ProblemConfig& cfg) {
  const Space sp = make_space(cfg);
  Rng rng(cfg.seed + 606);
  std::vector<CheckResult> out;
  double channel_max = 0.0;
  for (int trial = 0; trial < 2; ++trial) {
    const TaylorSetup ts = taylor_setup(sp, rng);
    const TangentTrajectory xi = solve_linearized(ts.traj, ts.h);
    const TangentTrajectory psi = solve_bilinearized(ts.traj, xi, xi);
    for (const auto& frame : psi.v) channel_max = std::max(channel_max, frame.cwiseAbs().maxCoeff());
    std::vector<double> epses{0.2, 0.1, 0.05, 0.025};
    std::vector<double> errs;
    for (const double eps : epses) {
      SpaceTimeField u_eps = ts.u;
      u_eps += eps * ts.h;
      const StateTrajectory pert = solve_state(u_eps, ts.phi0, ts.w0, sp.physics);
      std::vector<Eigen::VectorXd> predict(ts.traj.phi.size());
      for (size_t m = 0; m < predict.size(); ++m) {
        predict[m] = ts.traj.phi[m] + eps * xi.xi[m] + 0.5 * eps * eps * psi.xi[m];
      }
      errs.push_back(linf_h_distance(pert, predict));
    }
    const double slope = fit_slope(epses, errs);
    out.push_back({"taylor-second-order-slope-" + std::to_string(trial),
                   slope >= kTaylor2Lo && slope <= kTaylor2Hi, slope,
                   "remainder slope, errors " + fmt(errs.front()) + " .. " + fmt(errs.back())});
  }
  out.push_back({"bilinearized-channel-identically-zero", channel_max == 0.0, channel_max,
                 "max |channel component| over both trials (exact zero required)"});
  return out;
}

namespace {

struct GradientErrors {
  std::vector<double> per_direction;
};

GradientErrors gradient_errors_at(const ProblemConfig& cfg, int steps, Rng& rng) {
  ProblemConfig level = cfg;
  level.steps = steps;
  const Space sp = make_space(level);
  const CostConfig cost = derivative_check_cost(sp, cfg.b3);
  const SpaceTimeField u = analytic_control(sp, 0.4);
  const Field phi0 = smooth_initial_state(sp);
  const Field w0(sp.basis);

  const StateTrajectory traj = solve_state(u, phi0, w0, sp.physics);
  const auto [g1, g2] = build_adjoint_sources(traj, cost);
  const AdjointTrajectory adj = solve_adjoint(traj, g1, g2, sp.physics.gamma);
  const SpaceTimeField grad = reduced_gradient_smooth(u, traj, adj, cost.b3);

  GradientErrors out;
  const double eps = 1e-4;
  for (int dir = 0; dir < 3; ++dir) {
    const SpaceTimeField h = random_control(sp.basis, sp.times, rng, 1.0, 8);
    const double predicted = inner_q(grad, h);
    SpaceTimeField up = u, um = u;
    up += eps * h;
    um -= eps * h;
    const double jp = evaluate_cost(solve_state(up, phi0, w0, sp.physics), up, cost).smooth;
    const double jm = evaluate_cost(solve_state(um, phi0, w0, sp.physics), um, cost).smooth;
    const double fd = (jp - jm) / (2.0 * eps);
    out.per_direction.push_back(std::abs(predicted - fd) / std::max(std::abs(fd), 1e-30));
  }
  return out;
}

}  // namespace

std::vector<CheckResult> check_gradient_consistency(const ProblemConfig& cfg) {
  std::vector<CheckResult> out;
  Rng rng_a(cfg.seed + 707);
  Rng rng_b(cfg.seed + 707);  // identical directions at both resolutions
  const GradientErrors base = gradient_errors_at(cfg, cfg.steps, rng_a);
  const GradientErrors fine = gradient_errors_at(cfg, cfg.steps * 2, rng_b);
  double worst0 = 0.0, worst1 = 0.0;
  for (size_t d = 0; d < base.per_direction.size(); ++d) {
    const double e0 = base.per_direction[d];
    out.push_back({"gradient-fd-agreement-dir" + std::to_string(d), e0 <= kGradientTol, e0,
                   "rel error vs central difference"});
    worst0 = std::max(worst0, e0);
    worst1 = std::max(worst1, fine.per_direction[d]);
  }
  // the refinement factor is read off the dominant error; directions whose
  // leading coefficient nearly cancels cannot carry a meaningful ratio
  out.push_back({"gradient-refinement", worst1 <= worst0 / kRefinementFactor,
                 (worst1 > 0.0) ? worst0 / worst1 : std::numeric_limits<double>::infinity(),
                 "max-error ratio under halved step, fine err " + fmt(worst1)});
  return out;
}

std::vector<CheckResult> check_second_form_consistency(const ProblemConfig& cfg) {
  std::vector<CheckResult> out;
  auto evaluate_level = [&](int steps, Rng& rng, double& rel_err, double& sym_err) {
    ProblemConfig level = cfg;
    level.steps = steps;
    const Space sp = make_space(level);
    const CostConfig cost = derivative_check_cost(sp, cfg.b3);
    const SpaceTimeField u = analytic_control(sp, 0.4);
    const Field phi0 = smooth_initial_state(sp);
    const Field w0(sp.basis);
    const StateTrajectory traj = solve_state(u, phi0, w0, sp.physics);
    const auto [g1, g2] = build_adjoint_sources(traj, cost);
    const AdjointTrajectory adj = solve_adjoint(traj, g1, g2, sp.physics.gamma);

    const SpaceTimeField h = random_control(sp.basis, sp.times, rng, 1.0, 8);
    const SpaceTimeField k = random_control(sp.basis, sp.times, rng, 1.0, 8);
    const double q_hh = second_form(u, traj, adj, h, h, cost);
    const double q_hk = second_form(u, traj, adj, h, k, cost);
    const double q_kh = second_form(u, traj, adj, k, h, cost);
    sym_err = std::abs(q_hk - q_kh) / std::max({std::abs(q_hk), std::abs(q_kh), 1e-30});

    const double eps = 1e-3;
    SpaceTimeField up = u, um = u;
    up += eps * h;
    um -= eps * h;
    const double jc = evaluate_cost(traj, u, cost).smooth;
    const double jp = evaluate_cost(solve_state(up, phi0, w0, sp.physics), up, cost).smooth;
    const double jm = evaluate_cost(solve_state(um, phi0, w0, sp.physics), um, cost).smooth;
    const double fd = (jp - 2.0 * jc + jm) / (eps * eps);
    rel_err = std::abs(q_hh - fd) / std::max(std::abs(fd), 1e-30);
  };
  Rng rng_a(cfg.seed + 808);
  Rng rng_b(cfg.seed + 808);
  double rel0 = 0, sym0 = 0, rel1 = 0, sym1 = 0;
  evaluate_level(cfg.steps, rng_a, rel0, sym0);
  evaluate_level(cfg.steps * 2, rng_b, rel1, sym1);
  out.push_back({"second-form-fd-agreement", rel0 <= kSecondFormTol, rel0,
                 "rel error of Q(h,h) vs second central difference"});
  out.push_back({"second-form-symmetry", sym0 <= kSecondFormSymTol, sym0,
                 "rel |Q(h,k) - Q(k,h)|"});
  out.push_back({"second-form-refinement", rel1 <= rel0 / kRefinementFactor,
                 (rel1 > 0.0) ? rel0 / rel1 : std::numeric_limits<double>::infinity(),
                 "error ratio under halved step, fine err " + fmt(rel1)});
  return out;
}

TrackingProblem make_tracking_problem(const ProblemConfig& cfg) {
  TrackingProblem tp;
  const Space sp = make_space(cfg);
  tp.basis = sp.basis;
  tp.times = sp.times;
  tp.physics = sp.physics;
  tp.phi0 = smooth_initial_state(sp);
  tp.w0 = Field(sp.basis);
  tp.u_ref = analytic_control(sp, 0.5);
  tp.reference = solve_state(tp.u_ref, tp.phi0, tp.w0, sp.physics);
  tp.cost.b1 = cfg.b1;
  tp.cost.b2 = cfg.b2;
  tp.cost.b3 = cfg.b3;
  tp.cost.kappa = cfg.kappa;
  tp.cost.bounds.lower_value = cfg.u_lower;
  tp.cost.bounds.upper_value = cfg.u_upper;
  tp.cost.phi_q = SpaceTimeField::from_frames(sp.basis, sp.times, tp.reference.phi);
  tp.cost.phi_omega = Field::from_coeffs(sp.basis, tp.reference.phi.back());
  return tp;
}

OptimizerReport solve_tracking_problem(const TrackingProblem& problem,
                                       const OptimizerParams& params) {
  const SpaceTimeField u0(problem.basis, problem.times);
  return optimize(u0, problem.phi0, problem.w0, problem.physics, problem.cost, params);
}

std::vector<CheckResult> check_optimizer_kkt(const ProblemConfig& cfg,
                                             const OptimizerReport& report) {
  std::vector<CheckResult> out;
  const double final_kkt = report.history.back().kkt;
  out.push_back({"optimizer-kkt-converged",
                 report.converged && report.iterations <= cfg.optimizer.max_iters, final_kkt,
                 "final KKT residual after " + std::to_string(report.iterations) + " iterations (" +
                     report.status + ")"});
  double worst_increase = 0.0;
  for (size_t i = 1; i < report.history.size(); ++i) {
    worst_increase = std::max(worst_increase, report.history[i].total - report.history[i - 1].total);
  }
  out.push_back({"optimizer-monotone-history", worst_increase <= 0.0, worst_increase,
                 "max increase of the total cost between accepted iterates"});
  return out;
}

std::vector<CheckResult> check_sparsity(const ProblemConfig& cfg, const TrackingProblem& problem,
                                        const OptimizerReport& report) {
  (void)cfg;
  std::vector<CheckResult> out;
  const SpaceTimeField r = report.adj.r_spacetime();
  const SparsityReport rep = sparsity_report(report.u, r, problem.cost.kappa, kSparsityMargin);
  out.push_back({"sparsity-equivalence-violations", rep.violations == 0,
                 static_cast<double>(rep.violations),
                 "cells violating (u = 0 <=> |r| <= kappa), margin 1e-5; zero fraction " +
                     fmt(rep.fraction_zero)});
  const double residual = kkt_residual(report.u, r, problem.cost);
  out.push_back({"projection-formula-residual", residual <= kConvergedKkt, residual,
                 "L2 distance from the projection formula at the optimum"});
  const double lam_max = max_abs_nodal(report.multiplier);
  out.push_back({"multiplier-range", lam_max <= 1.0 + 1e-12, lam_max,
                 "max |lambda| (must stay within [-1,1])"});
  return out;
}

std::vector<CheckResult> check_kappa_sweep(const ProblemConfig& cfg) {
  TrackingProblem tp = make_tracking_problem(cfg);
  // adjoint at u = 0 sets the scale: kappa beyond sup|r| forces the zero control
  const StateTrajectory traj0 =
      solve_state(SpaceTimeField(tp.basis, tp.times), tp.phi0, tp.w0, tp.physics);
  const auto [g1, g2] = build_adjoint_sources(traj0, tp.cost);
  const AdjointTrajectory adj0 = solve_adjoint(traj0, g1, g2, tp.physics.gamma);
  const double r_sup = max_abs_nodal(adj0.r_spacetime());

  const std::vector<double> ladder{0.01, 0.1, 0.5, 1.0, 5.0};
  const double scale = 1.2 * r_sup / ladder.back();
  std::vector<double> fractions;
  double top_abs_max = -1.0;
  for (const double step : ladder) {
    TrackingProblem run = tp;
    run.cost.kappa = step * scale;
    const OptimizerReport rep = solve_tracking_problem(run, cfg.optimizer);
    const SparsityReport sr =
        sparsity_report(rep.u, rep.adj.r_spacetime(), run.cost.kappa, kZeroTol);
    fractions.push_back(sr.fraction_zero);
    if (step == ladder.back()) {
      double mx = 0.0;
      for (int m = 0; m < rep.u.num_frames(); ++m) {
        mx = std::max(mx, rep.u.frame(m).cwiseAbs().maxCoeff());
      }
      top_abs_max = mx;
    }
  }
  std::vector<CheckResult> out;
  bool monotone = true;
  std::ostringstream seq;
  for (size_t i = 0; i < fractions.size(); ++i) {
    if (i) {
      seq << " -> ";
      if (fractions[i] + 1e-12 < fractions[i - 1]) monotone = false;
    }
    seq << fmt(fractions[i]);
  }
  out.push_back({"kappa-sweep-monotone-sparsity", monotone, fractions.back(),
                 "zero fraction over increasing kappa: " + seq.str()});
  out.push_back({"kappa-sweep-full-sparsity", top_abs_max == 0.0, top_abs_max,
                 "max |u| coefficient for kappa above sup|r| (exact zero required)"});
  return out;
}

std::vector<CheckResult> check_coercivity(const ProblemConfig& cfg,
                                          const TrackingProblem& problem,
                                          const OptimizerReport& report) {
  std::vector<CheckResult> out;
  {
    // pure control-energy case: the quadratic form collapses to b3 |v|^2
    const Space sp = make_space(cfg);
    CostConfig cost;
    cost.b1 = 0.0;
    cost.b2 = 0.0;
    cost.b3 = cfg.b3;
    cost.kappa = 0.0;
    cost.bounds.lower_value = cfg.u_lower;
    cost.bounds.upper_value = cfg.u_upper;
    const SpaceTimeField u0(sp.basis, sp.times);
    const Field phi0 = smooth_initial_state(sp);
    const StateTrajectory traj = solve_state(u0, phi0, Field(sp.basis), sp.physics);
    const auto [g1, g2] = build_adjoint_sources(traj, cost);
    const AdjointTrajectory adj = solve_adjoint(traj, g1, g2, sp.physics.gamma);
    const double min_rayleigh =
        coercivity_probe(u0, traj, adj, cost, cfg.coercivity_samples, cfg.seed + 909);
    const bool ok = min_rayleigh >= (1.0 - kCoercivityMargin) * cfg.b3 &&
                    std::isfinite(min_rayleigh);
    out.push_back({"coercivity-control-case", ok, min_rayleigh,
                   "min Rayleigh value, expected " + fmt(cfg.b3)});
  }
  {
    const double min_rayleigh = coercivity_probe(report.u, report.traj, report.adj, problem.cost,
                                                 cfg.coercivity_samples, cfg.seed + 910);
    out.push_back({"coercivity-tracking-case",
                   std::isfinite(min_rayleigh) && min_rayleigh > 0.0, min_rayleigh,
                   "min Rayleigh value over projected critical-cone directions"});
  }
  return out;
}

std::vector<std::string> verify_suite_names() {
  return {"mass", "energy", "taylor1", "taylor2", "gradient", "kkt", "sparsity", "coercivity"};
}

std::vector<CheckResult> verify_suite(const ProblemConfig& cfg, const std::string& suite) {
  if (suite == "mass") return check_mass_conservation(cfg);
  if (suite == "energy") return check_energy_dissipation(cfg);
  if (suite == "taylor1") return check_taylor_first(cfg);
  if (suite == "taylor2") return check_taylor_second(cfg);
  if (suite == "gradient") {
    auto out = check_gradient_consistency(cfg);
    auto second = check_second_form_consistency(cfg);
    out.insert(out.end(), second.begin(), second.end());
    return out;
  }
  if (suite == "kkt") {
    const TrackingProblem problem = make_tracking_problem(cfg);
    const OptimizerReport report = solve_tracking_problem(problem, cfg.optimizer);
    return check_optimizer_kkt(cfg, report);
  }
  if (suite == "sparsity") {
    const TrackingProblem problem = make_tracking_problem(cfg);
    const OptimizerReport report = solve_tracking_problem(problem, cfg.optimizer);
    auto out = check_sparsity(cfg, problem, report);
    auto sweep = check_kappa_sweep(cfg);
    out.insert(out.end(), sweep.begin(), sweep.end());
    return out;
  }
  if (suite == "coercivity") {
    const TrackingProblem problem = make_tracking_problem(cfg);
    const OptimizerReport report = solve_tracking_problem(problem, cfg.optimizer);
    return check_coercivity(cfg, problem, report);
  }
  std::string names;
  for (const auto& n : verify_suite_names()) names += " " + n;
  throw std::invalid_argument("verify: unknown suite '" + suite + "'; available:" + names);
}

}  // namespace chc
