#pragma once

#include "chcontrol/state.hpp"

#include <utility>

namespace chc {

struct CostConfig;

/// Backward trajectory (p, q, r) of the adjoint system
///   -d/dt p - lap(q) + f''(phi*) q = g1,   q = -lap(p),
///   -gamma d/dt r + r - q = 0,
///   p(T) = g2,  r(T) = 0.
/// The stored q equals -lap(p) at every node by construction.
struct AdjointTrajectory {
  BasisPtr basis;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> p;
  std::vector<Eigen::VectorXd> q;
  std::vector<Eigen::VectorXd> r;

  int num_frames() const { return static_cast<int>(times.size()); }
  Field p_field(int m) const { return Field::from_coeffs(basis, p[static_cast<size_t>(m)]); }
  Field q_field(int m) const { return Field::from_coeffs(basis, q[static_cast<size_t>(m)]); }
  Field r_field(int m) const { return Field::from_coeffs(basis, r[static_cast<size_t>(m)]); }
  SpaceTimeField r_spacetime() const { return SpaceTimeField::from_frames(basis, times, r); }
};

/// Time mirror of the forward stepper: the flux q is taken implicitly through
/// the same per-mode stiffness factor as the forward solve, f''(phi*) q and
/// g1 are evaluated at the known later time level, and r is recovered by
/// exact exponential integration backward with q piecewise constant per step.
AdjointTrajectory solve_adjoint(const StateTrajectory& traj, const SpaceTimeField& g1,
                                const Field& g2, double gamma);

/// Tracking sources g1 = b1 (phi* - phi_Q), g2 = b2 (phi*(T) - phi_Omega).
std::pair<SpaceTimeField, Field> build_adjoint_sources(const StateTrajectory& traj,
                                                       const CostConfig& cost);

}  // namespace chc
