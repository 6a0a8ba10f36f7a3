#pragma once

#include "chcontrol/adjoint.hpp"
#include "chcontrol/sensitivity.hpp"

#include <cstdint>
#include <optional>

namespace chc {

/// Pointwise box constraints for the control, constant by default and
/// optionally given as space-time fields.
struct BoxBounds {
  double lower_value = -5.0;
  double upper_value = 5.0;
  std::optional<SpaceTimeField> lower_field;
  std::optional<SpaceTimeField> upper_field;

  bool is_constant() const { return !lower_field && !upper_field; }
  /// Nodal bound values on frame m of the given grid.
  Eigen::VectorXd lower_nodal(const BasisPtr& basis, int m) const;
  Eigen::VectorXd upper_nodal(const BasisPtr& basis, int m) const;
  void validate() const;
};

/// Weights, targets and bounds of the tracking cost
///   J(phi, u) = b1/2 ||phi - phi_Q||^2_Q + b2/2 ||phi(T) - phi_Omega||^2
///             + b3/2 ||u||^2_Q,
/// with the sparsity term kappa * G(u), G(u) = ||u||_{L1(Q)}.
/// Weights obey b1, b2 >= 0 and b3 > 0.  kappa > 0 activates sparsity;
/// kappa = 0 is accepted so that the second-order machinery can be probed
/// without the nonsmooth term.
struct CostConfig {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 1.0;
  double kappa = 0.0;
  SpaceTimeField phi_q;
  Field phi_omega;
  BoxBounds bounds;

  void validate() const;
};

struct CostValue {
  double smooth = 0.0;    // J
  double sparsity = 0.0;  // G
  double total = 0.0;     // J + kappa G
};

/// Zero-detection tolerance for sparsity classification; the prox produces
/// exact zeros so this is generous.
inline constexpr double kZeroTol = 1e-10;

CostValue evaluate_cost(const StateTrajectory& traj, const SpaceTimeField& u,
                        const CostConfig& cost);

double g_l1(const SpaceTimeField& u);
/// Closed-form directional derivative of G: sign(u) v where u != 0, |v| else.
double g_l1_directional(const SpaceTimeField& u, const SpaceTimeField& v,
                        double zero_tol = kZeroTol);

/// Nodewise r + b3 u, the gradient of the smooth reduced cost.
SpaceTimeField reduced_gradient_smooth(const SpaceTimeField& u, const StateTrajectory& traj,
                                       const AdjointTrajectory& adj, double b3);

/// Pointwise minimizer of  (x - v)^2 / 2 + tk |x|  over the box.
SpaceTimeField prox_box_l1(const SpaceTimeField& v, double tau_kappa, const BoxBounds& bounds);

/// Subgradient selection: sign(u) where |u| > zero_tol, clip(-r/kappa, -1, 1)
/// on the zero set (zero when kappa == 0).
SpaceTimeField recover_multiplier(const SpaceTimeField& u, const SpaceTimeField& r, double kappa,
                                  double b3);

/// L2(Q) distance between u and the projection-formula right-hand side
///   clip(-(r + kappa lambda)/b3, bounds);
/// zero exactly at points satisfying the first-order conditions.
double kkt_residual(const SpaceTimeField& u, const SpaceTimeField& r, const CostConfig& cost);

struct SparsityReport {
  double fraction_zero = 0.0;
  long violations = 0;
};
/// Fraction of cells with |u| <= tol, and the count of cells violating the
/// two-sided equivalence (u = 0 <=> |r| <= kappa) with margin tol.
SparsityReport sparsity_report(const SpaceTimeField& u, const SpaceTimeField& r, double kappa,
                               double tol);

/// Quadratic form of the reduced smooth cost:
///   Q(h, k) = iint (b1 - f'''(phi*) q*) xi_h xi_k + b2 int xi_h(T) xi_k(T)
///           + b3 iint h k.
double second_form(const SpaceTimeField& u, const StateTrajectory& traj,
                   const AdjointTrajectory& adj, const SpaceTimeField& h,
                   const SpaceTimeField& k, const CostConfig& cost);
/// Same with precomputed tangents (used by the probe to reuse solves).
double second_form_with_tangents(const StateTrajectory& traj, const AdjointTrajectory& adj,
                                 const TangentTrajectory& xi_h, const TangentTrajectory& xi_k,
                                 const SpaceTimeField& h, const SpaceTimeField& k,
                                 const CostConfig& cost);

/// Pointwise membership test for the discrete critical cone at (u, r) with a
/// symmetric margin `tol` around the measure-zero equalities.
bool critical_cone_check(const SpaceTimeField& v, const SpaceTimeField& u,
                         const SpaceTimeField& r, const CostConfig& cost, double tol);

/// Hard projection onto the discrete critical cone (zeroing and one-sided
/// clamping cellwise).
SpaceTimeField project_critical_cone(const SpaceTimeField& v, const SpaceTimeField& u,
                                     const SpaceTimeField& r, const CostConfig& cost, double tol);

/// Minimum Rayleigh value of the second form over `n_samples` random
/// directions projected into the critical cone and normalized in L2(Q).
/// Returns +infinity when every projection vanishes.
double coercivity_probe(const SpaceTimeField& u, const StateTrajectory& traj,
                        const AdjointTrajectory& adj, const CostConfig& cost, int n_samples,
                        uint64_t seed = 20240901, double tol = 1e-5);

}  // namespace chc
