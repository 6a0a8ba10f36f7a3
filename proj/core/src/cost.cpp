#include "chcontrol/cost.hpp"

#include "chcontrol/sampling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace chc {

namespace {

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

}  // namespace

Eigen::VectorXd BoxBounds::lower_nodal(const BasisPtr& basis, int m) const {
  if (lower_field) return basis->synthesize(lower_field->frame(m));
  return Eigen::VectorXd::Constant(basis->num_nodes(), lower_value);
}

Eigen::VectorXd BoxBounds::upper_nodal(const BasisPtr& basis, int m) const {
  if (upper_field) return basis->synthesize(upper_field->frame(m));
  return Eigen::VectorXd::Constant(basis->num_nodes(), upper_value);
}

void BoxBounds::validate() const {
  if (is_constant()) {
    if (!(lower_value <= upper_value)) {
      throw std::invalid_argument("BoxBounds: lower bound exceeds upper bound");
    }
    return;
  }
  if (lower_field && upper_field) require_same_grid(*lower_field, *upper_field);
  const SpaceTimeField& ref = lower_field ? *lower_field : *upper_field;
  for (int m = 0; m < ref.num_frames(); ++m) {
    const Eigen::VectorXd lo = lower_nodal(ref.basis(), m);
    const Eigen::VectorXd hi = upper_nodal(ref.basis(), m);
    if (((hi - lo).array() < 0.0).any()) {
      throw std::invalid_argument("BoxBounds: lower bound exceeds upper bound pointwise");
    }
  }
}

void CostConfig::validate() const {
  if (b1 < 0.0 || b2 < 0.0) throw std::invalid_argument("CostConfig: b1, b2 must be >= 0");
  if (!(b3 > 0.0)) throw std::invalid_argument("CostConfig: b3 must be > 0");
  if (kappa < 0.0) throw std::invalid_argument("CostConfig: kappa must be >= 0");
  if (b1 != 0.0 && phi_q.empty()) throw std::invalid_argument("CostConfig: phi_Q target not set");
  if (b2 != 0.0 && phi_omega.empty()) {
    throw std::invalid_argument("CostConfig: phi_Omega target not set");
  }
  bounds.validate();
}

CostValue evaluate_cost(const StateTrajectory& traj, const SpaceTimeField& u,
                        const CostConfig& cost) {
  if (!u.basis()->compatible_with(*traj.basis) || u.times() != traj.times) {
    throw std::invalid_argument("evaluate_cost: grid mismatch");
  }
  if (!cost.phi_q.empty() &&
      (!cost.phi_q.basis()->compatible_with(*traj.basis) || cost.phi_q.times() != traj.times)) {
    throw std::invalid_argument("evaluate_cost: target grid mismatch");
  }
  CostValue out;
  // tracking integral: piecewise-constant value on [t_m, t_{m+1}), matching
  // the control convention so the adjoint is the near-exact transpose
  double track = 0.0;
  if (cost.b1 != 0.0) {
    if (cost.phi_q.empty()) throw std::invalid_argument("evaluate_cost: phi_Q target not set");
    for (int m = 0; m < traj.num_steps(); ++m) {
      const double dt = traj.dt(m);
      track += dt * (traj.phi[static_cast<size_t>(m)] - cost.phi_q.frame(m)).squaredNorm();
    }
  }
  double terminal = 0.0;
  if (cost.b2 != 0.0) {
    if (cost.phi_omega.empty()) {
      throw std::invalid_argument("evaluate_cost: phi_Omega target not set");
    }
    terminal = (traj.phi[static_cast<size_t>(traj.num_steps())] - cost.phi_omega.coeffs())
                   .squaredNorm();
  }
  double control = 0.0;
  for (int m = 0; m < u.num_steps(); ++m) {
    control += u.dt(m) * u.frame(m).squaredNorm();
  }
  out.smooth = 0.5 * (cost.b1 * track + cost.b2 * terminal + cost.b3 * control);
  out.sparsity = g_l1(u);
  out.total = out.smooth + cost.kappa * out.sparsity;
  return out;
}

double g_l1(const SpaceTimeField& u) {
  const auto& basis = *u.basis();
  const double w = basis.quadrature_weight();
  double acc = 0.0;
  for (int m = 0; m < u.num_steps(); ++m) {
    acc += u.dt(m) * w * basis.synthesize(u.frame(m)).cwiseAbs().sum();
  }
  return acc;
}

double g_l1_directional(const SpaceTimeField& u, const SpaceTimeField& v, double zero_tol) {
  require_same_grid(u, v);
  const auto& basis = *u.basis();
  const double w = basis.quadrature_weight();
  double acc = 0.0;
  for (int m = 0; m < u.num_steps(); ++m) {
    const Eigen::VectorXd un = basis.synthesize(u.frame(m));
    const Eigen::VectorXd vn = basis.synthesize(v.frame(m));
    double cell = 0.0;
    for (Eigen::Index j = 0; j < un.size(); ++j) {
      if (un[j] > zero_tol) {
        cell += vn[j];
      } else if (un[j] < -zero_tol) {
        cell -= vn[j];
      } else {
        cell += std::abs(vn[j]);
      }
    }
    acc += u.dt(m) * w * cell;
  }
  return acc;
}

SpaceTimeField reduced_gradient_smooth(const SpaceTimeField& u, const StateTrajectory& traj,
                                       const AdjointTrajectory& adj, double b3) {
  if (!u.basis()->compatible_with(*traj.basis) || u.times() != adj.times) {
    throw std::invalid_argument("reduced_gradient_smooth: grid mismatch");
  }
  SpaceTimeField grad(u.basis(), u.times());
  for (int m = 0; m < u.num_frames(); ++m) {
    grad.frame(m) = adj.r[static_cast<size_t>(m)] + b3 * u.frame(m);
  }
  return grad;
}

SpaceTimeField prox_box_l1(const SpaceTimeField& v, double tau_kappa, const BoxBounds& bounds) {
  if (tau_kappa < 0.0) throw std::invalid_argument("prox_box_l1: tau_kappa must be >= 0");
  const auto& basis = v.basis();
  SpaceTimeField out(basis, v.times());
  for (int m = 0; m < v.num_frames(); ++m) {
    Eigen::VectorXd nodal = basis->synthesize(v.frame(m));
    const Eigen::VectorXd lo = bounds.lower_nodal(basis, m);
    const Eigen::VectorXd hi = bounds.upper_nodal(basis, m);
    for (Eigen::Index j = 0; j < nodal.size(); ++j) {
      const double soft =
          (nodal[j] > tau_kappa) ? nodal[j] - tau_kappa
                                 : ((nodal[j] < -tau_kappa) ? nodal[j] + tau_kappa : 0.0);
      nodal[j] = clamp(soft, lo[j], hi[j]);
    }
    out.frame(m) = basis->analyze(nodal);
  }
  return out;
}

SpaceTimeField recover_multiplier(const SpaceTimeField& u, const SpaceTimeField& r, double kappa,
                                  double b3) {
  require_same_grid(u, r);
  (void)b3;
  const auto& basis = u.basis();
  SpaceTimeField lambda(basis, u.times());
  for (int m = 0; m < u.num_frames(); ++m) {
    const Eigen::VectorXd un = basis->synthesize(u.frame(m));
    const Eigen::VectorXd rn = basis->synthesize(r.frame(m));
    Eigen::VectorXd ln(un.size());
    for (Eigen::Index j = 0; j < un.size(); ++j) {
      if (un[j] > kZeroTol) {
        ln[j] = 1.0;
      } else if (un[j] < -kZeroTol) {
        ln[j] = -1.0;
      } else {
        ln[j] = (kappa > 0.0) ? clamp(-rn[j] / kappa, -1.0, 1.0) : 0.0;
      }
    }
    lambda.frame(m) = basis->analyze(ln);
  }
  return lambda;
}

double kkt_residual(const SpaceTimeField& u, const SpaceTimeField& r, const CostConfig& cost) {
  require_same_grid(u, r);
  const auto& basis = u.basis();
  const double w = basis->quadrature_weight();
  const SpaceTimeField lambda = recover_multiplier(u, r, cost.kappa, cost.b3);
  double acc = 0.0;
  for (int m = 0; m < u.num_steps(); ++m) {
    const Eigen::VectorXd un = basis->synthesize(u.frame(m));
    const Eigen::VectorXd rn = basis->synthesize(r.frame(m));
    const Eigen::VectorXd ln = basis->synthesize(lambda.frame(m));
    const Eigen::VectorXd lo = cost.bounds.lower_nodal(basis, m);
    const Eigen::VectorXd hi = cost.bounds.upper_nodal(basis, m);
    double cell = 0.0;
    for (Eigen::Index j = 0; j < un.size(); ++j) {
      const double proj = clamp(-(rn[j] + cost.kappa * ln[j]) / cost.b3, lo[j], hi[j]);
      cell += (un[j] - proj) * (un[j] - proj);
    }
    acc += u.dt(m) * w * cell;
  }
  return std::sqrt(acc);
}

SparsityReport sparsity_report(const SpaceTimeField& u, const SpaceTimeField& r, double kappa,
                               double tol) {
  require_same_grid(u, r);
  const auto& basis = u.basis();
  SparsityReport rep;
  long zero_cells = 0;
  long total = 0;
  for (int m = 0; m < u.num_steps(); ++m) {
    const Eigen::VectorXd un = basis->synthesize(u.frame(m));
    const Eigen::VectorXd rn = basis->synthesize(r.frame(m));
    for (Eigen::Index j = 0; j < un.size(); ++j) {
      ++total;
      const bool u_zero = std::abs(un[j]) <= tol;
      if (u_zero) ++zero_cells;
      if (u_zero && std::abs(rn[j]) > kappa + tol) ++rep.violations;
      if (!u_zero && std::abs(rn[j]) < kappa - tol) ++rep.violations;
    }
  }
  rep.fraction_zero = total > 0 ? static_cast<double>(zero_cells) / total : 1.0;
  return rep;
}

double second_form_with_tangents(const StateTrajectory& traj, const AdjointTrajectory& adj,
                                 const TangentTrajectory& xi_h, const TangentTrajectory& xi_k,
                                 const SpaceTimeField& h, const SpaceTimeField& k,
                                 const CostConfig& cost) {
  const auto& basis = *traj.basis;
  const double wp = basis.padded_weight();
  double bulk = 0.0;
  // left-endpoint slabs to match the cost quadrature; the m = 0 slab drops
  // out because the tangents start from zero
  for (int m = 1; m < traj.num_steps(); ++m) {
    const size_t mm = static_cast<size_t>(m);
    const Eigen::VectorXd phi_n = basis.synthesize_padded(traj.phi[mm]);
    const Eigen::VectorXd q_n = basis.synthesize_padded(adj.q[mm]);
    const Eigen::VectorXd xh_n = basis.synthesize_padded(xi_h.xi[mm]);
    const Eigen::VectorXd xk_n = basis.synthesize_padded(xi_k.xi[mm]);
    double cell = 0.0;
    for (Eigen::Index j = 0; j < phi_n.size(); ++j) {
      const double weight =
          cost.b1 - potential_derivative(traj.params.potential, 3, phi_n[j]) * q_n[j];
      cell += weight * xh_n[j] * xk_n[j];
    }
    bulk += traj.dt(m) * wp * cell;
  }
  const size_t last = static_cast<size_t>(traj.num_steps());
  const double terminal = cost.b2 * xi_h.xi[last].dot(xi_k.xi[last]);
  return bulk + terminal + cost.b3 * inner_q(h, k);
}

double second_form(const SpaceTimeField& u, const StateTrajectory& traj,
                   const AdjointTrajectory& adj, const SpaceTimeField& h,
                   const SpaceTimeField& k, const CostConfig& cost) {
  (void)u;
  const TangentTrajectory xi_h = solve_linearized(traj, h);
  const TangentTrajectory xi_k = solve_linearized(traj, k);
  return second_form_with_tangents(traj, adj, xi_h, xi_k, h, k, cost);
}

namespace {

enum class ConeAction { kFree, kZero, kNonNegative, kNonPositive };

// Pointwise critical-cone constraint at a cell.  With kappa = 0 the
// subgradient sign clauses are vacuous and only the active box bounds and the
// stationarity band constrain the direction.
ConeAction cone_action(double u, double r, double lo, double hi, double b3, double kappa,
                       double tol) {
  const double slope = r + b3 * u;
  if (std::abs(std::abs(slope) - kappa) > tol) return ConeAction::kZero;
  bool lower = false;
  bool upper = false;
  if (u <= lo + tol) lower = true;
  if (u >= hi - tol) upper = true;
  if (kappa > kZeroTol && std::abs(u) <= kZeroTol) {
    if (std::abs(r + kappa) <= tol) lower = true;  // r = -kappa, u = 0
    if (std::abs(r - kappa) <= tol) upper = true;  // r = +kappa, u = 0
  }
  if (lower && upper) return ConeAction::kZero;
  if (lower) return ConeAction::kNonNegative;
  if (upper) return ConeAction::kNonPositive;
  return ConeAction::kFree;
}

}  // namespace

bool critical_cone_check(const SpaceTimeField& v, const SpaceTimeField& u,
                         const SpaceTimeField& r, const CostConfig& cost, double tol) {
  require_same_grid(v, u);
  require_same_grid(u, r);
  const auto& basis = u.basis();
  for (int m = 0; m < u.num_steps(); ++m) {
    const Eigen::VectorXd vn = basis->synthesize(v.frame(m));
    const Eigen::VectorXd un = basis->synthesize(u.frame(m));
    const Eigen::VectorXd rn = basis->synthesize(r.frame(m));
    const Eigen::VectorXd lo = cost.bounds.lower_nodal(basis, m);
    const Eigen::VectorXd hi = cost.bounds.upper_nodal(basis, m);
    for (Eigen::Index j = 0; j < un.size(); ++j) {
      switch (cone_action(un[j], rn[j], lo[j], hi[j], cost.b3, cost.kappa, tol)) {
        case ConeAction::kZero:
          if (std::abs(vn[j]) > tol) return false;
          break;
        case ConeAction::kNonNegative:
          if (vn[j] < -tol) return false;
          break;
        case ConeAction::kNonPositive:
          if (vn[j] > tol) return false;
          break;
        case ConeAction::kFree:
          break;
      }
    }
  }
  return true;
}

SpaceTimeField project_critical_cone(const SpaceTimeField& v, const SpaceTimeField& u,
                                     const SpaceTimeField& r, const CostConfig& cost,
                                     double tol) {
  require_same_grid(v, u);
  require_same_grid(u, r);
  const auto& basis = u.basis();
  SpaceTimeField out(basis, v.times());
  for (int m = 0; m < v.num_frames(); ++m) {
    if (m == v.num_frames() - 1) {
      out.frame(m) = out.frame(m - 1);
      break;
    }
    Eigen::VectorXd vn = basis->synthesize(v.frame(m));
    const Eigen::VectorXd un = basis->synthesize(u.frame(m));
    const Eigen::VectorXd rn = basis->synthesize(r.frame(m));
    const Eigen::VectorXd lo = cost.bounds.lower_nodal(basis, m);
    const Eigen::VectorXd hi = cost.bounds.upper_nodal(basis, m);
    for (Eigen::Index j = 0; j < vn.size(); ++j) {
      switch (cone_action(un[j], rn[j], lo[j], hi[j], cost.b3, cost.kappa, tol)) {
        case ConeAction::kZero:
          vn[j] = 0.0;
          break;
        case ConeAction::kNonNegative:
          vn[j] = std::max(vn[j], 0.0);
          break;
        case ConeAction::kNonPositive:
          vn[j] = std::min(vn[j], 0.0);
          break;
        case ConeAction::kFree:
          break;
      }
    }
    out.frame(m) = basis->analyze(vn);
  }
  return out;
}

double coercivity_probe(const SpaceTimeField& u, const StateTrajectory& traj,
                        const AdjointTrajectory& adj, const CostConfig& cost, int n_samples,
                        uint64_t seed, double tol) {
  const SpaceTimeField r = adj.r_spacetime();
  Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    SpaceTimeField v(u.basis(), u.times());
    for (int m = 0; m < v.num_frames() - 1; ++m) {
      Eigen::VectorXd nodal(u.basis()->num_nodes());
      for (Eigen::Index j = 0; j < nodal.size(); ++j) nodal[j] = rng.normal();
      v.frame(m) = u.basis()->analyze(nodal);
    }
    v.frame(v.num_frames() - 1) = v.frame(v.num_frames() - 2);
    v = project_critical_cone(v, u, r, cost, tol);
    const double nrm = norm_q(v);
    if (nrm < 1e-13) continue;
    v *= 1.0 / nrm;
    const TangentTrajectory xi = solve_linearized(traj, v);
    best = std::min(best, second_form_with_tangents(traj, adj, xi, xi, v, v, cost));
  }
  return best;
}

}  // namespace chc
