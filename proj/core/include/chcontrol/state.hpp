#pragma once

#include "chcontrol/field.hpp"
#include "chcontrol/potential.hpp"

namespace chc {

struct PhysicsParams {
  double gamma = 1.0;              // relaxation time of the control channel
  PotentialSpec potential{};
  double stabilization = 11.0;     // s >= 0; default matches the quartic well

  void validate() const;
};

/// Forward trajectory of the coupled system: order parameter phi, chemical
/// potential mu, control channel w, all stored as coefficient frames.
/// mu is reconstructed at every node from the constitutive relation
/// mu = -lap(phi) + f'(phi) - w, so its nodal residual is roundoff-level.
struct StateTrajectory {
  BasisPtr basis;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> phi;
  std::vector<Eigen::VectorXd> mu;
  std::vector<Eigen::VectorXd> w;
  Eigen::VectorXd phi0;
  Eigen::VectorXd w0;
  PhysicsParams params;

  int num_frames() const { return static_cast<int>(times.size()); }
  int num_steps() const { return num_frames() - 1; }
  double dt(int m) const { return times[static_cast<size_t>(m) + 1] - times[static_cast<size_t>(m)]; }
  Field phi_field(int m) const { return Field::from_coeffs(basis, phi[static_cast<size_t>(m)]); }
  Field mu_field(int m) const { return Field::from_coeffs(basis, mu[static_cast<size_t>(m)]); }
  Field w_field(int m) const { return Field::from_coeffs(basis, w[static_cast<size_t>(m)]); }
  SpaceTimeField phi_spacetime() const;
};

/// Exact exponential integration of gamma dw/dt + w = u for a control that is
/// piecewise constant in time:  w_{m+1} = w_m e^{-dt/g} + u_m (1 - e^{-dt/g}).
SpaceTimeField solve_control_ode(const SpaceTimeField& u, const Field& w0, double gamma);

/// Stabilized linearly implicit Euler step for the conserved phase dynamics;
/// diffusion of the chemical potential and the Laplacian of the unknown are
/// implicit, f' is taken at the old level plus the stabilization shift
/// s (phi_new - phi_old).  Each step is a diagonal solve in mode space, and
/// the constant mode of phi never moves, so the spatial mean is conserved to
/// the bit.  Aborts with the step index if the iterate leaves [-1e3, 1e3].
/// Pure function of its inputs; independent solves may run concurrently.
StateTrajectory solve_state(const SpaceTimeField& u, const Field& phi0, const Field& w0,
                            const PhysicsParams& params);

/// E(phi) = int ( |grad phi|^2 / 2 + f(phi) ), quadrature on the padded grid.
double free_energy(const Field& phi, const PotentialSpec& spec);

/// Residual norms of the constitutive relation at a node, computed two ways:
/// first with f'(phi_m) at the node itself, second with the scheme's lagged
/// f'(phi_{m-1}) + s (phi_m - phi_{m-1}) (for m = 0 both coincide).
struct MuResidual {
  double node_consistent;
  double scheme_lagged;
};
MuResidual mu_residual(const StateTrajectory& traj, int m);

}  // namespace chc
