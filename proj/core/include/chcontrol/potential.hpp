#pragma once

#include "chcontrol/field.hpp"

namespace chc {

/// Double-well nonlinearity f = f1 + f2 with derivatives up to fourth order.
///
/// The quartic family is f(x) = scale/4 (x^2 - well^2)^2, split into the
/// convex, nonnegative part f1 = scale/4 x^4 (f1(0) = 0) and the smooth
/// perturbation f2 = scale (w^4/4 - w^2 x^2/2), whose first derivative is
/// globally Lipschitz.
struct PotentialSpec {
  enum class Kind { quartic };
  Kind kind = Kind::quartic;
  double well = 1.0;
  double scale = 1.0;
};

/// Pointwise derivative of order 0..4 of f, f1 or f2.
double potential_derivative(const PotentialSpec& spec, int order, double x);
double potential_convex_derivative(const PotentialSpec& spec, int order, double x);
double potential_perturbation_derivative(const PotentialSpec& spec, int order, double x);

/// Nodal evaluation of f^(order) on the dealiased grid, projected back.
Field apply_pointwise(const PotentialSpec& spec, int order, const Field& f);

/// max |f''| over [-2, 2]; the default stabilization weight of the scheme.
double default_stabilization(const PotentialSpec& spec);

}  // namespace chc
