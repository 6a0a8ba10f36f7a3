#pragma once

#include "chcontrol/cost.hpp"
#include "chcontrol/optimizer.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace chc {

/// Preset or explicit description of a spatial field / target.
///   constant <v>
///   mode <k> <amp> [offset]            (1D)
///   mode <k0> <k1> <amp> [offset]      (2D)
///   coeffs <c0,c1,...>
///   file <path>                        (trajectory checkpoint)
struct FieldSpec {
  enum class Kind { constant, mode, coeffs, file };
  Kind kind = Kind::constant;
  double value = 0.0;
  std::array<int, 2> mode{0, 0};
  double amplitude = 0.0;
  double offset = 0.0;
  std::vector<double> coeffs;
  std::string path;

  static FieldSpec parse(const std::string& text, int dim, const std::string& context);
  std::string serialize(int dim) const;
};

/// Everything needed to reproduce a run.  Flat key/value text format with
/// sections; unknown keys are rejected, and any key can be overridden through
/// the environment as CHC_<SECTION>__<KEY>.
struct ProblemConfig {
  // [domain]
  int dim = 1;
  std::array<double, 2> lengths{3.14159265358979323846, 3.14159265358979323846};
  std::array<int, 2> modes{64, 64};
  double dealias_factor = 1.5;
  // [time]
  double t_final = 1.0;
  int steps = 400;
  // [physics]
  double gamma = 1.0;
  std::string potential = "quartic";
  double well = 1.0;
  double scale = 1.0;
  double stabilization = -1.0;  // < 0: use the potential's default
  // [cost]
  double b1 = 1.0;
  double b2 = 0.0;
  double b3 = 1e-2;
  double kappa = 1e-3;
  FieldSpec phi_q;
  FieldSpec phi_omega;
  double u_lower = -5.0;
  double u_upper = 5.0;
  // [initial]
  FieldSpec phi0;
  FieldSpec w0;
  // [control]
  FieldSpec u0;
  // [optimizer]
  OptimizerParams optimizer;
  // [sweep]
  std::vector<double> sweep_kappas{0.01, 0.1, 0.5, 1.0, 5.0};
  int coercivity_samples = 50;
  // [output]
  std::string out_dir = "out";
  bool emit_plot_script = false;
  // [run]
  uint64_t seed = 12345;

  static ProblemConfig load(const std::string& path);
  static ProblemConfig parse(const std::string& text, const std::string& origin);
  std::string serialize() const;
  void validate() const;

  BasisPtr make_basis() const;
  std::vector<double> make_times() const;
  PhysicsParams make_physics() const;
  Field resolve_field(const FieldSpec& spec, const BasisPtr& basis) const;
  SpaceTimeField resolve_control(const FieldSpec& spec, const BasisPtr& basis,
                                 const std::vector<double>& times) const;
  CostConfig make_cost(const BasisPtr& basis, const std::vector<double>& times) const;
};

bool operator==(const ProblemConfig& a, const ProblemConfig& b);

}  // namespace chc
