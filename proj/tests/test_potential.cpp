#include "test_support.hpp"

#include "chcontrol/potential.hpp"

#include <cmath>
#include <stdexcept>

using namespace chc;
using chct::kPi;

TEST_CASE("quartic derivative values") {
  const PotentialSpec spec;
  CHECK(potential_derivative(spec, 1, 1.0) == doctest::Approx(0.0));
  CHECK(potential_derivative(spec, 2, 0.0) == doctest::Approx(-1.0));
  CHECK(potential_derivative(spec, 3, 0.5) == doctest::Approx(3.0));
  CHECK(potential_derivative(spec, 0, 0.0) == doctest::Approx(0.25));
  CHECK(potential_derivative(spec, 4, 7.0) == doctest::Approx(6.0));
  CHECK_THROWS_AS(potential_derivative(spec, 5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(potential_derivative(spec, -1, 0.0), std::invalid_argument);
}

TEST_CASE("splitting adds up at every order") {
  const PotentialSpec spec{PotentialSpec::Kind::quartic, 1.3, 0.7};
  for (int order = 0; order <= 4; ++order) {
    for (int i = 0; i <= 60; ++i) {
      const double x = -3.0 + 0.1 * i;
      const double split = potential_convex_derivative(spec, order, x) +
                           potential_perturbation_derivative(spec, order, x);
      CHECK(split == doctest::Approx(potential_derivative(spec, order, x)).epsilon(1e-13));
    }
  }
  // convex part requirements
  CHECK(potential_convex_derivative(spec, 0, 0.0) == 0.0);
  for (int i = 0; i <= 1000; ++i) {
    const double x = -10.0 + 0.02 * i;
    CHECK(potential_convex_derivative(spec, 0, x) >= 0.0);
    CHECK(potential_convex_derivative(spec, 2, x) >= 0.0);
  }
}

TEST_CASE("finite differences match the next derivative order") {
  const PotentialSpec spec;
  const double h = 1e-5;
  for (int order = 0; order <= 3; ++order) {
    for (int i = 0; i < 50; ++i) {
      const double x = -3.0 + 6.0 * i / 49.0;
      const double fd =
          (potential_derivative(spec, order, x + h) - potential_derivative(spec, order, x - h)) /
          (2.0 * h);
      const double exact = potential_derivative(spec, order + 1, x);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("pointwise application on equilibria") {
  const auto basis = chct::interval_basis(16);
  const PotentialSpec spec;
  CHECK(norm_h(apply_pointwise(spec, 1, Field::constant(basis, 1.0))) <= 1e-13);
  CHECK(norm_h(apply_pointwise(spec, 1, Field::constant(basis, 0.0))) <= 1e-13);
}

TEST_CASE("projected nonlinearity matches refined quadrature") {
  const int n = 32;
  const auto basis = chct::interval_basis(n, kPi);
  Rng rng(13);
  const Field phi = random_field(basis, rng, 0.8, n / 4);
  const Field projected = apply_pointwise(PotentialSpec{}, 1, phi);

  // independent high-resolution midpoint quadrature of (f'(phi), e_k)
  const int fine = 4 * basis->num_padded_nodes();
  const double w = kPi / fine;
  Eigen::VectorXd oracle = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < fine; ++j) {
    const double x = (j + 0.5) * kPi / fine;
    double val = 0.0;
    for (int k = 0; k < n; ++k) {
      const double ek = (k == 0) ? 1.0 / std::sqrt(kPi) : std::sqrt(2.0 / kPi) * std::cos(k * x);
      val += phi.coeffs()[k] * ek;
    }
    const double fp = val * val * val - val;
    for (int k = 0; k < n; ++k) {
      const double ek = (k == 0) ? 1.0 / std::sqrt(kPi) : std::sqrt(2.0 / kPi) * std::cos(k * x);
      oracle[k] += w * fp * ek;
    }
  }
  CHECK((projected.coeffs() - oracle).norm() <= 1e-8);
}

TEST_CASE("default stabilization weight") {
  CHECK(default_stabilization(PotentialSpec{}) == doctest::Approx(11.0).epsilon(1e-12));
}
