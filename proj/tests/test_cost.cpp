#include "test_support.hpp"

#include "chcontrol/cost.hpp"
#include "chcontrol/verify.hpp"

#include <cmath>

using namespace chc;
using chct::default_physics;
using chct::interval_basis;
using chct::kPi;

namespace {

struct Setup {
  BasisPtr basis;
  std::vector<double> times;
  PhysicsParams physics;
  SpaceTimeField u;
  StateTrajectory traj;
};

Setup make_setup(uint64_t seed, int modes = 16, int steps = 80, double amplitude = 0.5) {
  Setup s;
  s.basis = interval_basis(modes);
  s.times = uniform_time_grid(1.0, steps);
  s.physics = default_physics();
  Rng rng(seed);
  s.u = random_control(s.basis, s.times, rng, amplitude, 6);
  Field phi0 = random_field(s.basis, rng, 0.2, 5);
  phi0 += Field::constant(s.basis, 0.3);
  s.traj = solve_state(s.u, phi0, Field(s.basis), s.physics);
  return s;
}

CostConfig plain_cost(double b3 = 2.0, double kappa = 3.0) {
  CostConfig cost;
  cost.b1 = 0.0;
  cost.b2 = 0.0;
  cost.b3 = b3;
  cost.kappa = kappa;
  cost.bounds.lower_value = -1e9;
  cost.bounds.upper_value = 1e9;
  return cost;
}

}  // namespace

TEST_CASE("cost of the attained tracking problem vanishes") {
  const Setup s = make_setup(401);
  CostConfig cost;
  cost.b1 = 1.0;
  cost.b2 = 1.0;
  cost.b3 = 1.0;
  cost.kappa = 2.0;
  cost.phi_q = SpaceTimeField::from_frames(s.basis, s.times, s.traj.phi);
  cost.phi_omega = Field::from_coeffs(s.basis, s.traj.phi.back());
  const SpaceTimeField zero(s.basis, s.times);
  const StateTrajectory traj0 = solve_state(
      zero, Field::from_coeffs(s.basis, s.traj.phi[0]),
      Field::from_coeffs(s.basis, s.traj.w[0]), s.physics);
  // evaluate against the trajectory the targets were built from, with u = 0
  const CostValue v = evaluate_cost(s.traj, zero, cost);
  CHECK(v.smooth == 0.0);
  CHECK(v.sparsity == 0.0);
  CHECK(v.total == 0.0);
  (void)traj0;
}

TEST_CASE("constant-control cost closed form") {
  const auto basis = interval_basis(8);
  const auto times = uniform_time_grid(1.0, 40);
  const SpaceTimeField u = SpaceTimeField::constant(basis, times, 1.0);
  const StateTrajectory traj =
      solve_state(u, Field::constant(basis, 0.5), Field(basis), default_physics());
  const CostConfig cost = plain_cost();
  const CostValue v = evaluate_cost(traj, u, cost);
  CHECK(v.smooth == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(v.sparsity == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(v.total == doctest::Approx(4.0 * kPi).epsilon(1e-12));
}

TEST_CASE("smooth cost agrees with a refined independent quadrature") {
  const Setup s = make_setup(409, 16, 40);
  Rng rng(3);
  CostConfig cost;
  cost.b1 = 1.2;
  cost.b2 = 0.8;
  cost.b3 = 1.7;
  cost.kappa = 0.6;
  SpaceTimeField q(s.basis, s.times);
  for (int m = 0; m < q.num_frames(); ++m) {
    q.frame(m) = random_field(s.basis, rng, 0.5, 5).coeffs();
  }
  cost.phi_q = q;
  cost.phi_omega = random_field(s.basis, rng, 0.5, 5);
  const CostValue v = evaluate_cost(s.traj, s.u, cost);

  // independent route: nodal quadrature on the padded grid per time slab
  double track = 0.0, control = 0.0;
  for (int m = 0; m + 1 < static_cast<int>(s.times.size()); ++m) {
    const Eigen::VectorXd diff = s.basis->synthesize_padded(
        s.traj.phi[static_cast<size_t>(m)] - q.frame(m));
    track += s.traj.dt(m) * s.basis->padded_weight() * diff.squaredNorm();
  }
  for (int m = 0; m + 1 < static_cast<int>(s.times.size()); ++m) {
    const Eigen::VectorXd un = s.basis->synthesize_padded(s.u.frame(m));
    control += s.u.dt(m) * s.basis->padded_weight() * un.squaredNorm();
  }
  const Eigen::VectorXd dT =
      s.basis->synthesize_padded(s.traj.phi.back() - cost.phi_omega.coeffs());
  const double terminal = s.basis->padded_weight() * dT.squaredNorm();
  const double oracle = 0.5 * (cost.b1 * track + cost.b2 * terminal + cost.b3 * control);
  CHECK(v.smooth == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("reduced gradient limiting cases") {
  const Setup s = make_setup(419, 12, 40);
  const CostConfig cost = plain_cost(1.6);
  const auto [g1, g2] = build_adjoint_sources(s.traj, cost);
  const AdjointTrajectory adj = solve_adjoint(s.traj, g1, g2, s.physics.gamma);
  // no tracking: the adjoint vanishes, gradient reduces to b3 u
  const SpaceTimeField grad = reduced_gradient_smooth(s.u, s.traj, adj, cost.b3);
  double worst = 0.0;
  for (int m = 0; m < grad.num_frames(); ++m) {
    worst = std::max(worst, (grad.frame(m) - cost.b3 * s.u.frame(m)).norm());
  }
  CHECK(worst == 0.0);
}

TEST_CASE("prox of the box-constrained l1 model") {
  const auto basis = interval_basis(8);
  const auto times = uniform_time_grid(1.0, 4);
  BoxBounds box;
  box.lower_value = -1.0;
  box.upper_value = 1.0;
  auto prox_scalar = [&](double v, double tk) {
    const SpaceTimeField vf = SpaceTimeField::constant(basis, times, v);
    const SpaceTimeField out = prox_box_l1(vf, tk, box);
    return mean(out.frame_field(0));
  };
  CHECK(prox_scalar(0.8, 0.5) == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(prox_scalar(0.3, 0.5) == doctest::Approx(0.0));
  CHECK(prox_scalar(5.0, 0.5) == doctest::Approx(1.0));
  CHECK(prox_scalar(-5.0, 0.5) == doctest::Approx(-1.0));

  // brute-force oracle over random scalar instances
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double v = rng.uniform(-4.0, 4.0);
    const double tk = rng.uniform(0.0, 2.0);
    const double lo = rng.uniform(-3.0, 0.0);
    const double hi = rng.uniform(0.0, 3.0);
    BoxBounds b2;
    b2.lower_value = lo;
    b2.upper_value = hi;
    const SpaceTimeField vf = SpaceTimeField::constant(basis, times, v);
    const double got = mean(prox_box_l1(vf, tk, b2).frame_field(0));
    double best_x = lo, best = 1e300;
    const int grid = 100000;
    for (int g = 0; g <= grid; ++g) {
      const double x = lo + (hi - lo) * g / grid;
      const double val = 0.5 * (x - v) * (x - v) + tk * std::abs(x);
      if (val < best) {
        best = val;
        best_x = x;
      }
    }
    CHECK(std::abs(got - best_x) <= 1e-4);
  }
}

TEST_CASE("multiplier recovery cases") {
  const auto basis = interval_basis(8);
  const auto times = uniform_time_grid(1.0, 4);
  const double kappa = 0.7;
  auto lambda_of = [&](double uval, double rval) {
    const SpaceTimeField u = SpaceTimeField::constant(basis, times, uval);
    const SpaceTimeField r = SpaceTimeField::constant(basis, times, rval);
    return mean(recover_multiplier(u, r, kappa, 1.0).frame_field(0));
  };
  CHECK(lambda_of(0.5, 0.3) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(lambda_of(-0.5, 0.3) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(lambda_of(0.0, 0.0) == doctest::Approx(0.0));
  CHECK(lambda_of(0.0, 2.0 * kappa) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(lambda_of(0.0, -0.35) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("kkt residual is zero without tracking at the origin") {
  const Setup s = make_setup(431, 12, 30);
  CostConfig cost = plain_cost(1.0, 0.5);
  cost.bounds.lower_value = -2.0;
  cost.bounds.upper_value = 2.0;
  const SpaceTimeField zero(s.basis, s.times);
  CHECK(kkt_residual(zero, zero, cost) == 0.0);

  // a one-cell perturbation is seen by the residual
  SpaceTimeField u = zero;
  Eigen::VectorXd nodal = Eigen::VectorXd::Zero(s.basis->num_nodes());
  nodal[3] = 0.9;
  u.frame(5) = s.basis->analyze(nodal);
  const double res = kkt_residual(u, zero, cost);
  CHECK(res > 0.05 * 0.9);  // at least c * delta
}

TEST_CASE("sparsity report") {
  const auto basis = interval_basis(8);
  const auto times = uniform_time_grid(1.0, 4);
  const SpaceTimeField zero(basis, times);
  const SparsityReport rep = sparsity_report(zero, zero, 1.0, kZeroTol);
  CHECK(rep.fraction_zero == 1.0);
  CHECK(rep.violations == 0);

  // |r| > kappa on the zero set counts as a violation
  const SpaceTimeField r = SpaceTimeField::constant(basis, times, 2.0);
  const SparsityReport bad = sparsity_report(zero, r, 1.0, 1e-5);
  CHECK(bad.violations > 0);
}

TEST_CASE("second form collapses to the control term without tracking") {
  const Setup s = make_setup(433, 12, 40);
  const CostConfig cost = plain_cost(1.9);
  const auto [g1, g2] = build_adjoint_sources(s.traj, cost);
  const AdjointTrajectory adj = solve_adjoint(s.traj, g1, g2, s.physics.gamma);
  Rng rng(17);
  const SpaceTimeField h = random_control(s.basis, s.times, rng, 1.0, 5);
  const SpaceTimeField k = random_control(s.basis, s.times, rng, 1.0, 5);
  const double qhh = second_form(s.u, s.traj, adj, h, h, cost);
  CHECK(qhh == doctest::Approx(cost.b3 * inner_q(h, h)).epsilon(1e-12));
  const double qhk = second_form(s.u, s.traj, adj, h, k, cost);
  const double qkh = second_form(s.u, s.traj, adj, k, h, cost);
  CHECK(std::abs(qhk - qkh) <= 1e-10 * std::max(std::abs(qhk), 1.0));
}

TEST_CASE("l1 functional properties") {
  const auto basis = interval_basis(16);
  const auto times = uniform_time_grid(1.0, 30);
  Rng rng(19);
  const SpaceTimeField u = random_control(basis, times, rng, 1.0, 6);
  const SpaceTimeField v = random_control(basis, times, rng, 1.0, 6);

  SpaceTimeField u3 = u;
  u3 *= -3.0;
  CHECK(g_l1(u3) == doctest::Approx(3.0 * g_l1(u)).epsilon(1e-12));

  SpaceTimeField mid = u + v;
  mid *= 0.5;
  CHECK(g_l1(mid) <= 0.5 * (g_l1(u) + g_l1(v)) + 1e-12);

  // directional derivative: difference quotients decrease to the closed form
  SpaceTimeField base = SpaceTimeField::constant(basis, times, 1.0);
  base += 0.3 * u;  // bounded away from zero
  const double closed = g_l1_directional(base, v);
  double prev = 1e300;
  for (const double t : {1e-2, 1e-3, 1e-4}) {
    SpaceTimeField shifted = base;
    shifted += t * v;
    const double quotient = (g_l1(shifted) - g_l1(base)) / t;
    CHECK(quotient <= prev + 1e-12);
    prev = quotient;
  }
  CHECK(std::abs(prev - closed) <= 1e-6 * std::max(1.0, std::abs(closed)));
}

TEST_CASE("critical cone membership") {
  const Setup s = make_setup(439, 12, 30);
  CostConfig cost = plain_cost(1.0, 0.5);
  cost.bounds.lower_value = -2.0;
  cost.bounds.upper_value = 2.0;
  const SpaceTimeField zero(s.basis, s.times);
  // at u = 0, r = 0 with kappa > 0 the slope condition forces v = 0
  CHECK(critical_cone_check(zero, zero, zero, cost, 1e-5));
  const SpaceTimeField ones = SpaceTimeField::constant(s.basis, s.times, 1.0);
  CHECK_FALSE(critical_cone_check(ones, zero, zero, cost, 1e-5));

  // projections land inside the cone
  Rng rng(23);
  SpaceTimeField r(s.basis, s.times);
  SpaceTimeField u(s.basis, s.times);
  for (int m = 0; m < r.num_frames(); ++m) {
    r.frame(m) = random_field(s.basis, rng, 0.4, 5).coeffs();
    u.frame(m) = random_field(s.basis, rng, 0.4, 5).coeffs();
  }
  for (int i = 0; i < 10; ++i) {
    const SpaceTimeField v = random_control(s.basis, s.times, rng, 1.0, 6);
    const SpaceTimeField proj = project_critical_cone(v, u, r, cost, 1e-5);
    CHECK(critical_cone_check(proj, u, r, cost, 1e-5));
  }
}

TEST_CASE("coercivity probe returns the control weight in the plain case") {
  const Setup s = make_setup(443, 12, 40, 0.0);
  CostConfig cost = plain_cost(0.0625, 0.0);
  cost.bounds.lower_value = -5.0;
  cost.bounds.upper_value = 5.0;
  const SpaceTimeField zero(s.basis, s.times);
  const StateTrajectory traj = solve_state(zero, Field::constant(s.basis, 0.3), Field(s.basis),
                                           s.physics);
  const auto [g1, g2] = build_adjoint_sources(traj, cost);
  const AdjointTrajectory adj = solve_adjoint(traj, g1, g2, s.physics.gamma);
  const double min_r = coercivity_probe(zero, traj, adj, cost, 10, 2024);
  CHECK(min_r == doctest::Approx(0.0625).epsilon(1e-10));

  // doubling b3 adds at least b3 to the Rayleigh value
  CostConfig cost2 = cost;
  cost2.b3 = 2.0 * cost.b3;
  const double min_r2 = coercivity_probe(zero, traj, adj, cost2, 10, 2024);
  CHECK(min_r2 >= min_r + cost.b3 - 1e-12);
}

TEST_CASE("gradient and second form agree with difference quotients") {
  ProblemConfig cfg;
  cfg.modes[0] = 24;
  cfg.steps = 400;
  cfg.b3 = 1e-2;
  cfg.seed = 31;
  for (const auto& res : check_gradient_consistency(cfg)) {
    INFO(res.name, " value=", res.value, " ", res.detail);
    CHECK(res.passed);
  }
  for (const auto& res : check_second_form_consistency(cfg)) {
    INFO(res.name, " value=", res.value, " ", res.detail);
    CHECK(res.passed);
  }
}
