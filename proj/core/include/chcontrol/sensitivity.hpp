#pragma once

#include "chcontrol/state.hpp"

namespace chc {

/// Generic linear tangent system with homogeneous initial data:
///   <d/dt xi, v> + (grad eta, grad v) = 0
///   -lap(xi) - eta - vch = a xi + g
///   gamma d/dt vch + vch = h
///   xi(0) = 0, vch(0) = 0.
/// The coefficient `a` is carried as nodal values on the padded grid at every
/// time node so that the discretized system is the exact linearization of the
/// forward stepper when a = -f''(phi*).
struct LinearTangentProblem {
  BasisPtr basis;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> a_padded_nodal;  // one per time node
  SpaceTimeField g;                             // source in the potential relation
  SpaceTimeField h;                             // control-channel source
  double gamma = 1.0;
  double stabilization = 11.0;

  /// Convenience: sample a coefficient given as a spectral field.
  static LinearTangentProblem from_fields(const SpaceTimeField& a, const SpaceTimeField& g,
                                          const SpaceTimeField& h, double gamma,
                                          double stabilization);
  void validate() const;
};

struct TangentTrajectory {
  BasisPtr basis;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> xi;   // phase component
  std::vector<Eigen::VectorXd> eta;  // potential component
  std::vector<Eigen::VectorXd> v;    // control-channel component

  int num_frames() const { return static_cast<int>(times.size()); }
  SpaceTimeField xi_spacetime() const { return SpaceTimeField::from_frames(basis, times, xi); }
  Field xi_field(int m) const { return Field::from_coeffs(basis, xi[static_cast<size_t>(m)]); }
};

TangentTrajectory solve_auxiliary(const LinearTangentProblem& problem);

/// First derivative of the control-to-state map at `traj` in direction h:
/// the generic system with a = -f''(phi*), g = 0.
TangentTrajectory solve_linearized(const StateTrajectory& traj, const SpaceTimeField& h);

/// Second derivative in directions (h, k): a = -f''(phi*),
/// g = -f'''(phi*) xi_h xi_k, no control-channel source.  The returned
/// channel component is identically zero.
TangentTrajectory solve_bilinearized(const StateTrajectory& traj, const TangentTrajectory& xi_h,
                                     const TangentTrajectory& xi_k);

}  // namespace chc
