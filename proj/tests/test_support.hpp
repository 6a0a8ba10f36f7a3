#pragma once

#include "chcontrol/sampling.hpp"
#include "chcontrol/state.hpp"

#include <doctest.h>

#include <cmath>

namespace chct {

inline constexpr double kPi = 3.14159265358979323846;

inline chc::BasisPtr interval_basis(int modes, double length = kPi, double dealias = 1.5) {
  return chc::SpectralBasis::build(1, {length, 0.0}, {modes, 0}, dealias);
}

inline chc::BasisPtr rectangle_basis(int mx, int my, double lx = kPi, double ly = kPi) {
  return chc::SpectralBasis::build(2, {lx, ly}, {mx, my});
}

inline chc::Field cosine_field(const chc::BasisPtr& basis, int k, double amplitude = 1.0,
                               double offset = 0.0) {
  const double length = basis->length(0);
  return chc::Field::from_function(basis, [=](double x, double) {
    return offset + amplitude * std::cos(k * kPi * x / length);
  });
}

inline chc::PhysicsParams default_physics() {
  chc::PhysicsParams p;
  p.gamma = 1.0;
  p.stabilization = 11.0;
  return p;
}

}  // namespace chct
