#include "chcontrol/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace chc {

namespace {

void check_order(int order) {
  if (order < 0 || order > 4) {
    throw std::invalid_argument("potential: derivative order must be in 0..4");
  }
}

}  // namespace

double potential_convex_derivative(const PotentialSpec& spec, int order, double x) {
  check_order(order);
  const double s = spec.scale;
  switch (order) {  // f1 = s/4 x^4
    case 0: return 0.25 * s * x * x * x * x;
    case 1: return s * x * x * x;
    case 2: return 3.0 * s * x * x;
    case 3: return 6.0 * s * x;
    default: return 6.0 * s;
  }
}

double potential_perturbation_derivative(const PotentialSpec& spec, int order, double x) {
  check_order(order);
  const double s = spec.scale;
  const double w2 = spec.well * spec.well;
  switch (order) {  // f2 = s (w^4/4 - w^2 x^2 / 2)
    case 0: return s * (0.25 * w2 * w2 - 0.5 * w2 * x * x);
    case 1: return -s * w2 * x;
    case 2: return -s * w2;
    default: return 0.0;
  }
}

double potential_derivative(const PotentialSpec& spec, int order, double x) {
  return potential_convex_derivative(spec, order, x) +
         potential_perturbation_derivative(spec, order, x);
}

Field apply_pointwise(const PotentialSpec& spec, int order, const Field& f) {
  check_order(order);
  const auto& basis = f.basis();
  Eigen::VectorXd nodal = basis->synthesize_padded(f.coeffs());
  for (Eigen::Index j = 0; j < nodal.size(); ++j) {
    nodal[j] = potential_derivative(spec, order, nodal[j]);
  }
  return Field::from_coeffs(basis, basis->analyze_padded(nodal));
}

double default_stabilization(const PotentialSpec& spec) {
  double mx = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = -2.0 + 4.0 * i / 1000.0;
    mx = std::max(mx, std::abs(potential_derivative(spec, 2, x)));
  }
  return mx;
}

}  // namespace chc
