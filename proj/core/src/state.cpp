#include "chcontrol/state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chc {

void PhysicsParams::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("PhysicsParams: gamma must be > 0");
  if (stabilization < 0.0) throw std::invalid_argument("PhysicsParams: stabilization must be >= 0");
}

SpaceTimeField StateTrajectory::phi_spacetime() const {
  return SpaceTimeField::from_frames(basis, times, phi);
}

SpaceTimeField solve_control_ode(const SpaceTimeField& u, const Field& w0, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("solve_control_ode: gamma must be > 0");
  require_same_basis(Field::from_coeffs(u.basis(), u.frame(0)), w0);
  SpaceTimeField w(u.basis(), u.times());
  w.frame(0) = w0.coeffs();
  for (int m = 0; m < u.num_steps(); ++m) {
    const double decay = std::exp(-u.dt(m) / gamma);
    w.frame(m + 1) = decay * w.frame(m) + (1.0 - decay) * u.frame(m);
  }
  return w;
}

namespace {

// f'(phi) evaluated nodally on the padded grid, projected back; the padded
// nodal values are returned as well so callers can reuse them.
Eigen::VectorXd nonlinearity(const SpectralBasis& basis, const PotentialSpec& pot,
                             const Eigen::VectorXd& phi_coeffs, Eigen::VectorXd& padded_out) {
  padded_out = basis.synthesize_padded(phi_coeffs);
  Eigen::VectorXd fp(padded_out.size());
  for (Eigen::Index j = 0; j < padded_out.size(); ++j) {
    fp[j] = potential_derivative(pot, 1, padded_out[j]);
  }
  return basis.analyze_padded(fp);
}

}  // namespace

StateTrajectory solve_state(const SpaceTimeField& u, const Field& phi0, const Field& w0,
                            const PhysicsParams& params) {
  params.validate();
  require_same_basis(phi0, w0);
  require_same_basis(Field::from_coeffs(u.basis(), u.frame(0)), phi0);
  const auto& basis = *u.basis();
  const auto& lam = basis.eigenvalues();
  const double s = params.stabilization;
  const int steps = u.num_steps();

  StateTrajectory traj;
  traj.basis = u.basis();
  traj.times = u.times();
  traj.params = params;
  traj.phi0 = phi0.coeffs();
  traj.w0 = w0.coeffs();
  traj.phi.resize(static_cast<size_t>(steps) + 1);
  traj.mu.resize(static_cast<size_t>(steps) + 1);
  traj.w.resize(static_cast<size_t>(steps) + 1);
  traj.phi[0] = phi0.coeffs();
  traj.w[0] = w0.coeffs();

  Eigen::VectorXd padded;
  Eigen::VectorXd fprime = nonlinearity(basis, params.potential, traj.phi[0], padded);
  traj.mu[0] = lam.cwiseProduct(traj.phi[0]) + fprime - traj.w[0];

  for (int m = 0; m < steps; ++m) {
    if (padded.cwiseAbs().maxCoeff() > 1e3) {
      throw std::runtime_error("solve_state: blow-up guard tripped at step " + std::to_string(m));
    }
    const double dt = u.dt(m);
    const double decay = std::exp(-dt / params.gamma);
    const size_t mm = static_cast<size_t>(m);
    traj.w[mm + 1] = decay * traj.w[mm] + (1.0 - decay) * u.frame(m);

    Eigen::VectorXd& next = traj.phi[mm + 1];
    next.resize(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
      const double stiff = 1.0 + dt * lam[k] * (lam[k] + s);
      if (!(stiff > 0.0) || !std::isfinite(stiff)) {
        throw std::runtime_error("solve_state: singular step solve at step " + std::to_string(m));
      }
      next[k] = ((1.0 + dt * lam[k] * s) * traj.phi[mm][k] -
                 dt * lam[k] * (fprime[k] - traj.w[mm + 1][k])) /
                stiff;
    }
    if (!next.allFinite()) {
      throw std::runtime_error("solve_state: non-finite state at step " + std::to_string(m));
    }
    fprime = nonlinearity(basis, params.potential, next, padded);
    traj.mu[mm + 1] = lam.cwiseProduct(next) + fprime - traj.w[mm + 1];
  }
  if (padded.cwiseAbs().maxCoeff() > 1e3) {
    throw std::runtime_error("solve_state: blow-up guard tripped at final step");
  }
  return traj;
}

double free_energy(const Field& phi, const PotentialSpec& spec) {
  const auto& basis = *phi.basis();
  const Eigen::VectorXd nodal = basis.synthesize_padded(phi.coeffs());
  double bulk = 0.0;
  for (Eigen::Index j = 0; j < nodal.size(); ++j) {
    bulk += potential_derivative(spec, 0, nodal[j]);
  }
  return 0.5 * grad_norm_sq(phi) + basis.padded_weight() * bulk;
}

MuResidual mu_residual(const StateTrajectory& traj, int m) {
  const auto& basis = *traj.basis;
  const auto& lam = basis.eigenvalues();
  const size_t mm = static_cast<size_t>(m);
  Eigen::VectorXd padded;
  const Eigen::VectorXd fp_node =
      nonlinearity(basis, traj.params.potential, traj.phi[mm], padded);
  MuResidual out{};
  out.node_consistent =
      (lam.cwiseProduct(traj.phi[mm]) + fp_node - traj.mu[mm] - traj.w[mm]).norm();
  if (m == 0) {
    out.scheme_lagged = out.node_consistent;
    return out;
  }
  const Eigen::VectorXd fp_lag =
      nonlinearity(basis, traj.params.potential, traj.phi[mm - 1], padded);
  const Eigen::VectorXd lagged = lam.cwiseProduct(traj.phi[mm]) + fp_lag +
                                 traj.params.stabilization * (traj.phi[mm] - traj.phi[mm - 1]) -
                                 traj.mu[mm] - traj.w[mm];
  out.scheme_lagged = lagged.norm();
  return out;
}

}  // namespace chc
