#include "chcontrol/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace chc {

void OptimizerParams::validate() const {
  if (max_iters < 1) throw std::invalid_argument("OptimizerParams: max_iters must be >= 1");
  if (!(kkt_tol > 0.0)) throw std::invalid_argument("OptimizerParams: kkt_tol must be > 0");
  if (tau0 < 0.0) throw std::invalid_argument("OptimizerParams: tau0 must be >= 0");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw std::invalid_argument("OptimizerParams: backtrack_factor must be in (0,1)");
  }
  if (sufficient_decrease < 0.0) {
    throw std::invalid_argument("OptimizerParams: sufficient_decrease must be >= 0");
  }
  if (max_backtracks < 1) throw std::invalid_argument("OptimizerParams: max_backtracks >= 1");
}

namespace {

struct Evaluated {
  SpaceTimeField u;
  StateTrajectory traj;
  CostValue value;
};

Evaluated evaluate(SpaceTimeField u, const Field& phi0, const Field& w0,
                   const PhysicsParams& physics, const CostConfig& cost) {
  Evaluated e;
  e.traj = solve_state(u, phi0, w0, physics);
  e.value = evaluate_cost(e.traj, u, cost);
  e.u = std::move(u);
  return e;
}

}  // namespace

OptimizerReport optimize(const SpaceTimeField& u0, const Field& phi0, const Field& w0,
                         const PhysicsParams& physics, const CostConfig& cost,
                         const OptimizerParams& params) {
  params.validate();
  cost.validate();
  physics.validate();

  const double tau0 = (params.tau0 > 0.0) ? params.tau0 : 1.0 / cost.b3;

  // feasible start: clip onto the box (a pure projection, zero threshold)
  Evaluated cur = evaluate(prox_box_l1(u0, 0.0, cost.bounds), phi0, w0, physics, cost);
  SpaceTimeField prev_u = cur.u;  // for the optional extrapolation
  double theta_prev = 1.0;

  OptimizerReport report;
  report.status = "max-iterations";
  for (int iter = 0; iter < params.max_iters; ++iter) {
    auto [g1, g2] = build_adjoint_sources(cur.traj, cost);
    AdjointTrajectory adj = solve_adjoint(cur.traj, g1, g2, physics.gamma);
    const SpaceTimeField r = adj.r_spacetime();
    const SpaceTimeField grad = reduced_gradient_smooth(cur.u, cur.traj, adj, cost.b3);
    const double kkt = kkt_residual(cur.u, r, cost);
    const SparsityReport sparsity = sparsity_report(cur.u, r, cost.kappa, kZeroTol);

    IterateRecord rec;
    rec.iter = iter;
    rec.j_smooth = cur.value.smooth;
    rec.g_value = cur.value.sparsity;
    rec.total = cur.value.total;
    rec.kkt = kkt;
    rec.sparsity_fraction = sparsity.fraction_zero;
    rec.step = 0.0;
    report.history.push_back(rec);

    if (kkt <= params.kkt_tol) {
      report.converged = true;
      report.status = "kkt-tolerance";
      report.u = cur.u;
      report.traj = std::move(cur.traj);
      report.adj = std::move(adj);
      report.multiplier = recover_multiplier(cur.u, r, cost.kappa, cost.b3);
      report.iterations = iter;
      return report;
    }

    // Backtracking proximal step from a base point; accepts on an Armijo-type
    // sufficient decrease of the full nonsmooth objective against the current
    // iterate.  Returns true and advances `cur` on success.
    bool stalled = false;
    auto attempt = [&](const SpaceTimeField& base_point, const SpaceTimeField& base_grad,
                       int tries, bool allow_stall) {
      double tau = tau0;
      for (int bt = 0; bt < tries; ++bt) {
        SpaceTimeField cand = base_point;
        cand -= tau * base_grad;
        cand = prox_box_l1(cand, tau * cost.kappa, cost.bounds);
        const SpaceTimeField diff = cand - cur.u;
        const double move_sq = inner_q(diff, diff);
        if (move_sq == 0.0) {
          if (allow_stall) stalled = true;
          return false;
        }
        Evaluated next = evaluate(std::move(cand), phi0, w0, physics, cost);
        const double required =
            cur.value.total - params.sufficient_decrease * move_sq / (2.0 * tau);
        if (next.value.total <= required) {
          report.history.back().step = tau;
          prev_u = cur.u;
          cur = std::move(next);
          return true;
        }
        tau *= params.backtrack_factor;
      }
      return false;
    };

    bool accepted = false;
    const double theta =
        params.accelerate ? 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta_prev * theta_prev)) : 1.0;
    if (params.accelerate && iter > 0) {
      // monotone extrapolation probe: gradient at the extrapolated point, but
      // acceptance still measured against the current objective value
      const double weight = (theta_prev - 1.0) / theta;
      SpaceTimeField y = cur.u;
      y += weight * (cur.u - prev_u);
      y = prox_box_l1(y, 0.0, cost.bounds);
      Evaluated ey = evaluate(std::move(y), phi0, w0, physics, cost);
      auto [h1, h2] = build_adjoint_sources(ey.traj, cost);
      const AdjointTrajectory adj_y = solve_adjoint(ey.traj, h1, h2, physics.gamma);
      const SpaceTimeField grad_y = reduced_gradient_smooth(ey.u, ey.traj, adj_y, cost.b3);
      accepted = attempt(ey.u, grad_y, 8, /*allow_stall=*/false);
    }
    theta_prev = theta;
    if (!accepted) {
      accepted = attempt(cur.u, grad, params.max_backtracks, /*allow_stall=*/true);
    }
    if (!accepted) {
      report.status = stalled ? "stalled" : "backtracking-failed";
      break;
    }
  }

  auto [g1, g2] = build_adjoint_sources(cur.traj, cost);
  AdjointTrajectory adj = solve_adjoint(cur.traj, g1, g2, physics.gamma);
  const SpaceTimeField r = adj.r_spacetime();
  const double kkt = kkt_residual(cur.u, r, cost);
  const SparsityReport sparsity = sparsity_report(cur.u, r, cost.kappa, kZeroTol);
  IterateRecord rec;
  rec.iter = static_cast<int>(report.history.size());
  rec.j_smooth = cur.value.smooth;
  rec.g_value = cur.value.sparsity;
  rec.total = cur.value.total;
  rec.kkt = kkt;
  rec.sparsity_fraction = sparsity.fraction_zero;
  report.history.push_back(rec);
  report.converged = kkt <= params.kkt_tol;
  if (report.converged) report.status = "kkt-tolerance";
  report.u = cur.u;
  report.traj = std::move(cur.traj);
  report.adj = std::move(adj);
  report.multiplier = recover_multiplier(cur.u, r, cost.kappa, cost.b3);
  report.iterations = static_cast<int>(report.history.size()) - 1;
  return report;
}

}  // namespace chc
