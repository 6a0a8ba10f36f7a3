#include "chcontrol/sensitivity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chc {

LinearTangentProblem LinearTangentProblem::from_fields(const SpaceTimeField& a,
                                                       const SpaceTimeField& g,
                                                       const SpaceTimeField& h, double gamma,
                                                       double stabilization) {
  require_same_grid(a, g);
  require_same_grid(a, h);
  LinearTangentProblem p;
  p.basis = a.basis();
  p.times = a.times();
  p.a_padded_nodal.resize(static_cast<size_t>(a.num_frames()));
  for (int m = 0; m < a.num_frames(); ++m) {
    p.a_padded_nodal[static_cast<size_t>(m)] = a.basis()->synthesize_padded(a.frame(m));
  }
  p.g = g;
  p.h = h;
  p.gamma = gamma;
  p.stabilization = stabilization;
  return p;
}

void LinearTangentProblem::validate() const {
  if (!basis) throw std::invalid_argument("LinearTangentProblem: missing basis");
  if (!(gamma > 0.0)) throw std::invalid_argument("LinearTangentProblem: gamma must be > 0");
  if (stabilization < 0.0) {
    throw std::invalid_argument("LinearTangentProblem: stabilization must be >= 0");
  }
  if (a_padded_nodal.size() != times.size()) {
    throw std::invalid_argument("LinearTangentProblem: coefficient frame count mismatch");
  }
  for (const auto& a : a_padded_nodal) {
    if (a.size() != basis->num_padded_nodes()) {
      throw std::invalid_argument("LinearTangentProblem: coefficient is not on the padded grid");
    }
  }
  require_same_grid(g, h);
  if (!g.basis()->compatible_with(*basis) || g.times() != times) {
    throw std::invalid_argument("LinearTangentProblem: source grid mismatch");
  }
}

TangentTrajectory solve_auxiliary(const LinearTangentProblem& problem) {
  problem.validate();
  const auto& basis = *problem.basis;
  const auto& lam = basis.eigenvalues();
  const double s = problem.stabilization;
  const int steps = static_cast<int>(problem.times.size()) - 1;

  TangentTrajectory out;
  out.basis = problem.basis;
  out.times = problem.times;
  out.xi.assign(static_cast<size_t>(steps) + 1, Eigen::VectorXd::Zero(lam.size()));
  out.eta.resize(static_cast<size_t>(steps) + 1);
  out.v.assign(static_cast<size_t>(steps) + 1, Eigen::VectorXd::Zero(lam.size()));

  // [a xi] projected, reused for both the step and the eta reconstruction
  auto coeff_product = [&](int m, const Eigen::VectorXd& xi_coeffs) {
    const Eigen::VectorXd nodal = basis.synthesize_padded(xi_coeffs);
    return basis.analyze_padded(
        problem.a_padded_nodal[static_cast<size_t>(m)].cwiseProduct(nodal));
  };

  Eigen::VectorXd axi = Eigen::VectorXd::Zero(lam.size());  // a(0) xi(0) = 0
  out.eta[0] = -axi - problem.g.frame(0) - out.v[0];
  for (int m = 0; m < steps; ++m) {
    const size_t mm = static_cast<size_t>(m);
    const double dt = problem.times[mm + 1] - problem.times[mm];
    const double decay = std::exp(-dt / problem.gamma);
    out.v[mm + 1] = decay * out.v[mm] + (1.0 - decay) * problem.h.frame(m);

    Eigen::VectorXd& next = out.xi[mm + 1];
    next.resize(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
      const double stiff = 1.0 + dt * lam[k] * (lam[k] + s);
      if (!(stiff > 0.0) || !std::isfinite(stiff)) {
        throw std::runtime_error("solve_auxiliary: singular step solve at step " +
                                 std::to_string(m));
      }
      next[k] = ((1.0 + dt * lam[k] * s) * out.xi[mm][k] +
                 dt * lam[k] * (axi[k] + problem.g.frame(m)[k] + out.v[mm + 1][k])) /
                stiff;
    }
    axi = coeff_product(m + 1, next);
    out.eta[mm + 1] = lam.cwiseProduct(next) - axi - problem.g.frame(m + 1) - out.v[mm + 1];
  }
  return out;
}

namespace {

std::vector<Eigen::VectorXd> negative_second_derivative_nodal(const StateTrajectory& traj) {
  const auto& basis = *traj.basis;
  std::vector<Eigen::VectorXd> a(traj.phi.size());
  for (size_t m = 0; m < traj.phi.size(); ++m) {
    Eigen::VectorXd nodal = basis.synthesize_padded(traj.phi[m]);
    for (Eigen::Index j = 0; j < nodal.size(); ++j) {
      nodal[j] = -potential_derivative(traj.params.potential, 2, nodal[j]);
    }
    a[m] = std::move(nodal);
  }
  return a;
}

}  // namespace

TangentTrajectory solve_linearized(const StateTrajectory& traj, const SpaceTimeField& h) {
  if (!h.basis()->compatible_with(*traj.basis) || h.times() != traj.times) {
    throw std::invalid_argument("solve_linearized: grid mismatch with trajectory");
  }
  LinearTangentProblem p;
  p.basis = traj.basis;
  p.times = traj.times;
  p.a_padded_nodal = negative_second_derivative_nodal(traj);
  p.g = SpaceTimeField(traj.basis, traj.times);
  p.h = h;
  p.gamma = traj.params.gamma;
  p.stabilization = traj.params.stabilization;
  return solve_auxiliary(p);
}

TangentTrajectory solve_bilinearized(const StateTrajectory& traj, const TangentTrajectory& xi_h,
                                     const TangentTrajectory& xi_k) {
  if (xi_h.times != traj.times || xi_k.times != traj.times ||
      !xi_h.basis->compatible_with(*traj.basis) || !xi_k.basis->compatible_with(*traj.basis)) {
    throw std::invalid_argument("solve_bilinearized: grid mismatch with trajectory");
  }
  const auto& basis = *traj.basis;
  LinearTangentProblem p;
  p.basis = traj.basis;
  p.times = traj.times;
  p.a_padded_nodal = negative_second_derivative_nodal(traj);
  p.gamma = traj.params.gamma;
  p.stabilization = traj.params.stabilization;

  // g = -f'''(phi*) xi_h xi_k, formed nodally on the padded grid
  std::vector<Eigen::VectorXd> g_frames(traj.phi.size());
  for (size_t m = 0; m < traj.phi.size(); ++m) {
    Eigen::VectorXd phi_nodal = basis.synthesize_padded(traj.phi[m]);
    const Eigen::VectorXd h_nodal = basis.synthesize_padded(xi_h.xi[m]);
    const Eigen::VectorXd k_nodal = basis.synthesize_padded(xi_k.xi[m]);
    for (Eigen::Index j = 0; j < phi_nodal.size(); ++j) {
      phi_nodal[j] =
          -potential_derivative(traj.params.potential, 3, phi_nodal[j]) * h_nodal[j] * k_nodal[j];
    }
    g_frames[m] = basis.analyze_padded(phi_nodal);
  }
  p.g = SpaceTimeField::from_frames(traj.basis, traj.times, std::move(g_frames));
  p.h = SpaceTimeField(traj.basis, traj.times);
  return solve_auxiliary(p);
}

}  // namespace chc
