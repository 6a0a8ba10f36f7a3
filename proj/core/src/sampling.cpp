#include "chcontrol/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace chc {

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * 3.14159265358979323846 * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

Field random_field(const BasisPtr& basis, Rng& rng, double amplitude, int band, bool zero_mean) {
  const int n = basis->num_modes();
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(n);
  const auto& lam = basis->eigenvalues();
  const double lam_band = (band > 0) ? lam[std::min(band, n - 1)] : lam[n - 1] * 0.25 + 1.0;
  for (int k = 0; k < n; ++k) {
    if (band > 0 && lam[k] > lam_band) continue;
    coeffs[k] = rng.normal() / (1.0 + lam[k] / (1.0 + lam_band * 0.25));
  }
  if (zero_mean) coeffs[0] = 0.0;
  const double nrm = coeffs.norm();
  if (nrm > 0.0) coeffs *= amplitude / nrm;
  return Field::from_coeffs(basis, std::move(coeffs));
}

SpaceTimeField random_control(const BasisPtr& basis, const std::vector<double>& times, Rng& rng,
                              double amplitude, int band) {
  // smooth in time: a few random spatial profiles blended by slow envelopes
  const Field a0 = random_field(basis, rng, 1.0, band);
  const Field a1 = random_field(basis, rng, 1.0, band);
  const Field a2 = random_field(basis, rng, 1.0, band);
  const double t_final = times.back();
  SpaceTimeField u(basis, times);
  for (int m = 0; m < u.num_frames(); ++m) {
    const double theta = 3.14159265358979323846 * times[static_cast<size_t>(m)] / t_final;
    u.frame(m) = a0.coeffs() + std::sin(theta) * a1.coeffs() + std::cos(theta) * a2.coeffs();
  }
  double mx = 0.0;
  for (int m = 0; m < u.num_frames(); ++m) mx = std::max(mx, u.frame(m).norm());
  if (mx > 0.0) u *= amplitude / mx;
  return u;
}

std::vector<double> uniform_time_grid(double t_final, int steps) {
  if (!(t_final > 0.0) || steps < 1) {
    throw std::invalid_argument("uniform_time_grid: need t_final > 0 and steps >= 1");
  }
  std::vector<double> t(static_cast<size_t>(steps) + 1);
  for (int m = 0; m <= steps; ++m) t[static_cast<size_t>(m)] = t_final * m / steps;
  return t;
}

}  // namespace chc
