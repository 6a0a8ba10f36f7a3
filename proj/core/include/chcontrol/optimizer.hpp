#pragma once

#include "chcontrol/cost.hpp"

#include <string>
#include <vector>

namespace chc {

struct OptimizerParams {
  int max_iters = 500;
  double kkt_tol = 1e-6;
  double tau0 = 0.0;                  // initial step; 0 means 1/b3
  double backtrack_factor = 0.5;
  double sufficient_decrease = 1e-4;  // Armijo weight on |u+ - u|^2 / (2 tau)
  int max_backtracks = 60;
  bool accelerate = false;            // monotone extrapolation variant

  void validate() const;
};

struct IterateRecord {
  int iter = 0;
  double j_smooth = 0.0;
  double g_value = 0.0;
  double total = 0.0;
  double kkt = 0.0;
  double sparsity_fraction = 0.0;
  double step = 0.0;  // accepted step length (0 on the final record)
};

struct OptimizerReport {
  std::vector<IterateRecord> history;
  SpaceTimeField u;
  StateTrajectory traj;
  AdjointTrajectory adj;
  SpaceTimeField multiplier;
  bool converged = false;
  int iterations = 0;
  std::string status;
};

/// Proximal projected-gradient loop on the composite objective:
///   u+ = prox_box_l1(u - tau (r + b3 u), tau kappa, bounds)
/// with backtracking from tau0 = 1/b3 and an Armijo-type sufficient decrease
/// on the full nonsmooth objective.  Stops at the KKT residual tolerance or
/// the iteration cap.  The recorded total-cost history is non-increasing.
OptimizerReport optimize(const SpaceTimeField& u0, const Field& phi0, const Field& w0,
                         const PhysicsParams& physics, const CostConfig& cost,
                         const OptimizerParams& params);

}  // namespace chc
