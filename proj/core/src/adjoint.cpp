#include "chcontrol/adjoint.hpp"

#include "chcontrol/cost.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chc {

AdjointTrajectory solve_adjoint(const StateTrajectory& traj, const SpaceTimeField& g1,
                                const Field& g2, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("solve_adjoint: gamma must be > 0");
  if (!g1.basis()->compatible_with(*traj.basis) || g1.times() != traj.times) {
    throw std::invalid_argument("solve_adjoint: source grid mismatch with trajectory");
  }
  require_same_basis(g2, Field::from_coeffs(traj.basis, traj.phi[0]));

  const auto& basis = *traj.basis;
  const auto& lam = basis.eigenvalues();
  const double s = traj.params.stabilization;
  const int steps = traj.num_steps();

  AdjointTrajectory adj;
  adj.basis = traj.basis;
  adj.times = traj.times;
  adj.p.resize(static_cast<size_t>(steps) + 1);
  adj.q.resize(static_cast<size_t>(steps) + 1);
  adj.r.resize(static_cast<size_t>(steps) + 1);
  adj.p[static_cast<size_t>(steps)] = g2.coeffs();
  adj.q[static_cast<size_t>(steps)] = lam.cwiseProduct(g2.coeffs());
  adj.r[static_cast<size_t>(steps)] = Eigen::VectorXd::Zero(lam.size());

  for (int m = steps - 1; m >= 0; --m) {
    const size_t mm = static_cast<size_t>(m);
    const double dt = traj.dt(m);
    const double decay = std::exp(-dt / gamma);

    // flux through the same stiffness factor the forward step inverts
    Eigen::VectorXd flux(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
      const double stiff = 1.0 + dt * lam[k] * (lam[k] + s);
      if (!(stiff > 0.0) || !std::isfinite(stiff)) {
        throw std::runtime_error("solve_adjoint: singular step solve at step " +
                                 std::to_string(m));
      }
      flux[k] = lam[k] * adj.p[mm + 1][k] / stiff;
    }

    // f''(phi*) flux, with phi* at the known later level
    Eigen::VectorXd nodal = basis.synthesize_padded(traj.phi[mm + 1]);
    const Eigen::VectorXd flux_nodal = basis.synthesize_padded(flux);
    for (Eigen::Index j = 0; j < nodal.size(); ++j) {
      nodal[j] = potential_derivative(traj.params.potential, 2, nodal[j]) * flux_nodal[j];
    }
    const Eigen::VectorXd curvature = basis.analyze_padded(nodal);

    adj.p[mm] = adj.p[mm + 1] - dt * (lam.cwiseProduct(flux) + curvature - g1.frame(m));
    adj.q[mm] = lam.cwiseProduct(adj.p[mm]);
    adj.r[mm] = decay * adj.r[mm + 1] + (1.0 - decay) * flux;
    if (!adj.p[mm].allFinite()) {
      throw std::runtime_error("solve_adjoint: non-finite adjoint at step " + std::to_string(m));
    }
  }
  return adj;
}

std::pair<SpaceTimeField, Field> build_adjoint_sources(const StateTrajectory& traj,
                                                       const CostConfig& cost) {
  SpaceTimeField g1(traj.basis, traj.times);
  if (cost.b1 != 0.0) {
    if (cost.phi_q.empty() || !cost.phi_q.basis()->compatible_with(*traj.basis) ||
        cost.phi_q.times() != traj.times) {
      throw std::invalid_argument("build_adjoint_sources: target grid mismatch with trajectory");
    }
    for (int m = 0; m < g1.num_frames(); ++m) {
      g1.frame(m) = cost.b1 * (traj.phi[static_cast<size_t>(m)] - cost.phi_q.frame(m));
    }
  }
  Field g2(traj.basis);
  if (cost.b2 != 0.0) {
    if (cost.phi_omega.empty()) {
      throw std::invalid_argument("build_adjoint_sources: phi_Omega target not set");
    }
    g2 = Field::from_coeffs(traj.basis,
                            cost.b2 * (traj.phi[static_cast<size_t>(traj.num_steps())] -
                                       cost.phi_omega.coeffs()));
  }
  return {std::move(g1), std::move(g2)};
}

}  // namespace chc
