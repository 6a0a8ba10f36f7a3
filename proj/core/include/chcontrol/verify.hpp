#pragma once

#include "chcontrol/config.hpp"
#include "chcontrol/optimizer.hpp"

#include <string>
#include <vector>

namespace chc {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string detail;
};

/// Reference-tracking problem whose target trajectory is generated by a known
/// smooth control, so the tracking residual can be driven to near zero.
struct TrackingProblem {
  BasisPtr basis;
  std::vector<double> times;
  PhysicsParams physics;
  Field phi0;
  Field w0;
  SpaceTimeField u_ref;
  StateTrajectory reference;
  CostConfig cost;
};

TrackingProblem make_tracking_problem(const ProblemConfig& cfg);
OptimizerReport solve_tracking_problem(const TrackingProblem& problem,
                                       const OptimizerParams& params);

// Individual invariant checks.  Tolerances are fixed constants of the
// verification harness, not configuration.
std::vector<CheckResult> check_mass_conservation(const ProblemConfig& cfg);
std::vector<CheckResult> check_operator_identities(const ProblemConfig& cfg);
std::vector<CheckResult> check_control_ode(const ProblemConfig& cfg);
std::vector<CheckResult> check_energy_dissipation(const ProblemConfig& cfg);
std::vector<CheckResult> check_taylor_first(const ProblemConfig& cfg);
std::vector<CheckResult> check_taylor_second(const ProblemConfig& cfg);
std::vector<CheckResult> check_gradient_consistency(const ProblemConfig& cfg);
std::vector<CheckResult> check_second_form_consistency(const ProblemConfig& cfg);
std::vector<CheckResult> check_optimizer_kkt(const ProblemConfig& cfg,
                                             const OptimizerReport& report);
std::vector<CheckResult> check_sparsity(const ProblemConfig& cfg, const TrackingProblem& problem,
                                        const OptimizerReport& report);
std::vector<CheckResult> check_kappa_sweep(const ProblemConfig& cfg);
std::vector<CheckResult> check_coercivity(const ProblemConfig& cfg,
                                          const TrackingProblem& problem,
                                          const OptimizerReport& report);

/// Named suites exposed by the command line:
/// mass, energy, taylor1, taylor2, gradient, kkt, sparsity, coercivity.
std::vector<std::string> verify_suite_names();
std::vector<CheckResult> verify_suite(const ProblemConfig& cfg, const std::string& suite);

}  // namespace chc
