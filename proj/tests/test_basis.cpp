#include "test_support.hpp"

#include "chcontrol/field.hpp"

#include <cmath>
#include <stdexcept>

using namespace chc;
using chct::interval_basis;
using chct::kPi;

TEST_CASE("eigenvalue table on the unit-pi interval") {
  const auto basis = interval_basis(8);
  const auto lam = basis->sorted_eigenvalues();
  REQUIRE(lam.size() == 8);
  for (int k = 0; k < 8; ++k) {
    CHECK(lam[static_cast<size_t>(k)] == doctest::Approx(k * k).epsilon(1e-13));
  }
}

TEST_CASE("eigenvalue table on the square") {
  const auto basis = chct::rectangle_basis(4, 4);
  const auto lam = basis->sorted_eigenvalues();
  REQUIRE(lam.size() == 16);
  CHECK(lam[0] == doctest::Approx(0.0));
  CHECK(lam[1] == doctest::Approx(1.0));
  CHECK(lam[2] == doctest::Approx(1.0));
  CHECK(lam[3] == doctest::Approx(2.0));
}

TEST_CASE("degenerate construction is rejected") {
  CHECK_THROWS_AS(SpectralBasis::build(1, {1.0, 0.0}, {3, 0}), std::invalid_argument);
  CHECK_THROWS_AS(SpectralBasis::build(1, {-1.0, 0.0}, {8, 0}), std::invalid_argument);
  CHECK_THROWS_AS(SpectralBasis::build(3, {1.0, 1.0}, {8, 8}), std::invalid_argument);
}

TEST_CASE("transform round trip is lossless") {
  Rng rng(7);
  for (const auto& basis :
       {interval_basis(16), interval_basis(33, 2.5), chct::rectangle_basis(8, 6, 2.0, 1.0)}) {
    const Field f = random_field(basis, rng, 1.0);
    const Eigen::VectorXd back = basis->analyze(basis->synthesize(f.coeffs()));
    CHECK((back - f.coeffs()).norm() <= 1e-13 * f.coeffs().norm());
    const Eigen::VectorXd back_padded = basis->analyze_padded(basis->synthesize_padded(f.coeffs()));
    CHECK((back_padded - f.coeffs()).norm() <= 1e-13 * f.coeffs().norm());
  }
}

TEST_CASE("mode functions are orthonormal") {
  const auto basis = interval_basis(12, 1.7);
  for (int j : {0, 1, 5}) {
    for (int k : {0, 2, 5, 11}) {
      Field ej(basis), ek(basis);
      ej.coeffs()[j] = 1.0;
      ek.coeffs()[k] = 1.0;
      CHECK(inner(ej, ek) == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-14));
      // nodal quadrature agrees with the coefficient inner product
      const double quad =
          basis->quadrature_weight() * ej.nodal().cwiseProduct(ek.nodal()).sum();
      CHECK(quad == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("mean value") {
  const auto basis = interval_basis(16);
  CHECK(mean(Field::constant(basis, 2.75)) == doctest::Approx(2.75).epsilon(1e-14));
  CHECK(std::abs(mean(chct::cosine_field(basis, 1))) <= 1e-14);

  Rng rng(11);
  const Field f = random_field(basis, rng, 1.3);
  const double quad_mean =
      basis->quadrature_weight() * f.nodal().sum() / basis->domain_measure();
  CHECK(mean(f) == doctest::Approx(quad_mean).epsilon(1e-12));
}

TEST_CASE("coefficient norm equals quadrature norm") {
  const auto basis = interval_basis(24, 2.2);
  Rng rng(3);
  const Field f = random_field(basis, rng, 0.8);
  const double quad = std::sqrt(basis->quadrature_weight() * f.nodal().squaredNorm());
  CHECK(norm_h(f) == doctest::Approx(quad).epsilon(1e-12));
}

TEST_CASE("inverse Neumann Laplacian") {
  const auto basis = interval_basis(16);
  const Field c1 = chct::cosine_field(basis, 1);
  const Field c2 = chct::cosine_field(basis, 2);

  CHECK(norm_h(inv_neumann_laplacian(c1) - c1) <= 1e-12);
  Field quarter = c2;
  quarter *= 0.25;
  CHECK(norm_h(inv_neumann_laplacian(c2) - quarter) <= 1e-12);
  CHECK_THROWS_WITH_AS(inv_neumann_laplacian(Field::constant(basis, 1.0)),
                       "inv_neumann_laplacian: mean-value violation", std::invalid_argument);
}

TEST_CASE("laplacian on cosine modes") {
  const auto basis = interval_basis(16);
  const Field c1 = chct::cosine_field(basis, 1);
  Field minus = c1;
  minus *= -1.0;
  CHECK(norm_h(laplacian(c1) - minus) <= 1e-12);
}

TEST_CASE("operator identities on random zero-mean fields") {
  const auto basis = interval_basis(32, 1.3);
  Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const Field f = random_field(basis, rng, 1.0, -1, /*zero_mean=*/true);
    const Field g = random_field(basis, rng, 1.0, -1, /*zero_mean=*/true);
    CHECK(norm_h(laplacian(inv_neumann_laplacian(f)) + f) <= 1e-12 * norm_h(f));
    const double a = inner(f, inv_neumann_laplacian(g));
    const double b = inner(g, inv_neumann_laplacian(f));
    CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), 1.0));
    // the dual norm squared is the pairing with the inverse-Laplacian image
    CHECK(inner(f, inv_neumann_laplacian(f)) ==
          doctest::Approx(std::pow(dual_norm(f), 2)).epsilon(1e-12));
  }
}

TEST_CASE("dual norm closed forms") {
  const auto basis = interval_basis(16);
  CHECK(dual_norm(chct::cosine_field(basis, 1)) ==
        doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-13));
  CHECK(dual_norm(Field::constant(basis, -3.5)) == doctest::Approx(3.5).epsilon(1e-14));

  Rng rng(5);
  const Field f = random_field(basis, rng, 2.0);
  Field centered = f;
  centered -= Field::constant(basis, mean(f));
  const double lhs = std::pow(dual_norm(f), 2);
  const double rhs = grad_norm_sq(inv_neumann_laplacian(centered)) + std::pow(mean(f), 2);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("poincare-type bound is stable") {
  const auto basis = interval_basis(24, 1.9);
  Rng rng(23);
  auto ratio = [&](const Field& v) {
    return norm_v(v) / (std::sqrt(grad_norm_sq(v)) + std::abs(mean(v)));
  };
  double c_est = 0.0;
  for (int i = 0; i < 50; ++i) c_est = std::max(c_est, ratio(random_field(basis, rng, 1.0)));
  for (int i = 0; i < 50; ++i) CHECK(ratio(random_field(basis, rng, 1.0)) <= 1.5 * c_est);
}

TEST_CASE("basis mismatch is rejected") {
  const auto a = interval_basis(8);
  const auto b = interval_basis(16);
  Rng rng(1);
  const Field fa = random_field(a, rng, 1.0);
  const Field fb = random_field(b, rng, 1.0);
  CHECK_THROWS_AS(inner(fa, fb), std::invalid_argument);
}

TEST_CASE("two-dimensional fields") {
  const auto basis = chct::rectangle_basis(8, 6, kPi, 2.0);
  // laplacian of the (1,1) tensor mode picks up the summed eigenvalue
  Field f(basis);
  const int flat = 1 * 6 + 1;
  f.coeffs()[flat] = 1.0;
  const double expected = 1.0 + std::pow(kPi / 2.0, 2);
  CHECK(laplacian(f).coeffs()[flat] == doctest::Approx(-expected).epsilon(1e-13));
  CHECK(basis->eigenvalue(flat) == doctest::Approx(expected).epsilon(1e-13));

  Rng rng(2);
  const Field g = random_field(basis, rng, 1.0, -1, true);
  CHECK(norm_h(laplacian(inv_neumann_laplacian(g)) + g) <= 1e-12 * norm_h(g));
}
