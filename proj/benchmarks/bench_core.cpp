#include "chcontrol/adjoint.hpp"
#include "chcontrol/cost.hpp"
#include "chcontrol/sampling.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace chc;

struct BenchFixture {
  BasisPtr basis;
  std::vector<double> times;
  PhysicsParams physics;
  SpaceTimeField u;
  Field phi0;
  StateTrajectory traj;

  explicit BenchFixture(int modes, int steps) {
    basis = SpectralBasis::build(1, {3.141592653589793, 0.0}, {modes, 0});
    times = uniform_time_grid(1.0, steps);
    physics.gamma = 1.0;
    physics.stabilization = 11.0;
    Rng rng(99);
    u = random_control(basis, times, rng, 0.5, 8);
    phi0 = random_field(basis, rng, 0.2, 8);
    phi0 += Field::constant(basis, 0.3);
    traj = solve_state(u, phi0, Field(basis), physics);
  }
};

BenchFixture& fixture(int modes, int steps) {
  static BenchFixture f(modes, steps);
  return f;
}

void BM_Transform(benchmark::State& state) {
  auto& f = fixture(64, 100);
  Rng rng(1);
  const Field field = random_field(f.basis, rng, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.basis->analyze_padded(f.basis->synthesize_padded(field.coeffs())));
  }
}
BENCHMARK(BM_Transform);

void BM_StateSolve(benchmark::State& state) {
  auto& f = fixture(64, 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_state(f.u, f.phi0, Field(f.basis), f.physics));
  }
}
BENCHMARK(BM_StateSolve);

void BM_AdjointSolve(benchmark::State& state) {
  auto& f = fixture(64, 100);
  CostConfig cost;
  cost.b1 = 1.0;
  cost.b3 = 1e-2;
  cost.phi_q = SpaceTimeField::constant(f.basis, f.times, 0.25);
  cost.phi_omega = Field::constant(f.basis, 0.25);
  const auto [g1, g2] = build_adjoint_sources(f.traj, cost);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_adjoint(f.traj, g1, g2, f.physics.gamma));
  }
}
BENCHMARK(BM_AdjointSolve);

void BM_ProxStep(benchmark::State& state) {
  auto& f = fixture(64, 100);
  BoxBounds box;
  box.lower_value = -5.0;
  box.upper_value = 5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox_box_l1(f.u, 1e-3, box));
  }
}
BENCHMARK(BM_ProxStep);

}  // namespace

BENCHMARK_MAIN();
