#include "chcontrol/field.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace chc {

Field::Field(BasisPtr basis) : basis_(std::move(basis)) {
  coeffs_ = Eigen::VectorXd::Zero(basis_->num_modes());
}

Field Field::from_coeffs(BasisPtr basis, Eigen::VectorXd coeffs) {
  if (coeffs.size() != basis->num_modes()) {
    throw std::invalid_argument("Field::from_coeffs: coefficient count does not match basis");
  }
  Field f;
  f.basis_ = std::move(basis);
  f.coeffs_ = std::move(coeffs);
  return f;
}

Field Field::from_nodal(const BasisPtr& basis, const Eigen::VectorXd& nodal) {
  if (nodal.size() != basis->num_nodes()) {
    throw std::invalid_argument("Field::from_nodal: nodal count does not match basis grid");
  }
  return from_coeffs(basis, basis->analyze(nodal));
}

Field Field::constant(const BasisPtr& basis, double value) {
  Field f(basis);
  // e_0 is the constant 1/sqrt(|Omega|), so value = c_0 / sqrt(|Omega|)
  f.coeffs_[0] = value * std::sqrt(basis->domain_measure());
  return f;
}

Field Field::from_function(const BasisPtr& basis,
                           const std::function<double(double, double)>& f) {
  Eigen::VectorXd nodal(basis->num_nodes());
  for (int j = 0; j < basis->num_nodes(); ++j) {
    const auto x = basis->node_position(j);
    nodal[j] = f(x[0], x[1]);
  }
  return from_nodal(basis, nodal);
}

void require_same_basis(const Field& a, const Field& b) {
  if (a.empty() || b.empty() || !a.basis()->compatible_with(*b.basis())) {
    throw std::invalid_argument("field operation: basis mismatch between operands");
  }
}

Field& Field::operator+=(const Field& other) {
  require_same_basis(*this, other);
  coeffs_ += other.coeffs_;
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_basis(*this, other);
  coeffs_ -= other.coeffs_;
  return *this;
}

Field& Field::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

double mean(const Field& f) {
  return f.coeffs()[0] / std::sqrt(f.basis()->domain_measure());
}

double norm_h(const Field& f) { return f.coeffs().norm(); }

double inner(const Field& a, const Field& b) {
  require_same_basis(a, b);
  return a.coeffs().dot(b.coeffs());
}

double grad_norm_sq(const Field& f) {
  const auto& lam = f.basis()->eigenvalues();
  return f.coeffs().cwiseAbs2().dot(lam);
}

double norm_v(const Field& f) {
  return std::sqrt(f.coeffs().squaredNorm() + grad_norm_sq(f));
}

double linf_norm(const Field& f) { return f.nodal().cwiseAbs().maxCoeff(); }

Field laplacian(const Field& f) {
  Eigen::VectorXd c = -f.basis()->eigenvalues().cwiseProduct(f.coeffs());
  return Field::from_coeffs(f.basis(), std::move(c));
}

Field inv_neumann_laplacian(const Field& f) {
  const double nrm = norm_h(f);
  if (std::abs(mean(f)) > 1e-10 * std::max(nrm, 1e-300)) {
    throw std::invalid_argument("inv_neumann_laplacian: mean-value violation");
  }
  const auto& lam = f.basis()->eigenvalues();
  Eigen::VectorXd c(f.coeffs().size());
  c[0] = 0.0;
  for (Eigen::Index k = 1; k < c.size(); ++k) c[k] = f.coeffs()[k] / lam[k];
  return Field::from_coeffs(f.basis(), std::move(c));
}

double dual_norm(const Field& f) {
  const auto& lam = f.basis()->eigenvalues();
  double acc = std::pow(mean(f), 2);
  for (Eigen::Index k = 1; k < f.coeffs().size(); ++k) {
    acc += f.coeffs()[k] * f.coeffs()[k] / lam[k];
  }
  return std::sqrt(acc);
}

SpaceTimeField::SpaceTimeField(BasisPtr basis, std::vector<double> times)
    : basis_(std::move(basis)), times_(std::move(times)) {
  if (times_.size() < 2) {
    throw std::invalid_argument("SpaceTimeField: a time grid needs at least two nodes");
  }
  for (size_t m = 0; m + 1 < times_.size(); ++m) {
    if (!(times_[m + 1] > times_[m])) {
      throw std::invalid_argument("SpaceTimeField: time grid must be strictly increasing");
    }
  }
  frames_.assign(times_.size(), Eigen::VectorXd::Zero(basis_->num_modes()));
}

SpaceTimeField SpaceTimeField::constant(const BasisPtr& basis, const std::vector<double>& times,
                                        double value) {
  SpaceTimeField f(basis, times);
  const Field c = Field::constant(basis, value);
  for (auto& frame : f.frames_) frame = c.coeffs();
  return f;
}

SpaceTimeField SpaceTimeField::from_frames(BasisPtr basis, std::vector<double> times,
                                           std::vector<Eigen::VectorXd> frames) {
  SpaceTimeField f(std::move(basis), std::move(times));
  if (frames.size() != f.times_.size()) {
    throw std::invalid_argument("SpaceTimeField::from_frames: frame/time count mismatch");
  }
  for (const auto& fr : frames) {
    if (fr.size() != f.basis_->num_modes()) {
      throw std::invalid_argument("SpaceTimeField::from_frames: frame size mismatch");
    }
  }
  f.frames_ = std::move(frames);
  return f;
}

SpaceTimeField SpaceTimeField::from_function(
    const BasisPtr& basis, const std::vector<double>& times,
    const std::function<double(double, double, double)>& f) {
  SpaceTimeField out(basis, times);
  Eigen::VectorXd nodal(basis->num_nodes());
  for (int m = 0; m < out.num_frames(); ++m) {
    for (int j = 0; j < basis->num_nodes(); ++j) {
      const auto x = basis->node_position(j);
      nodal[j] = f(x[0], x[1], times[static_cast<size_t>(m)]);
    }
    out.frame(m) = basis->analyze(nodal);
  }
  return out;
}

void require_same_grid(const SpaceTimeField& a, const SpaceTimeField& b) {
  if (a.empty() || b.empty() || !a.basis()->compatible_with(*b.basis()) ||
      a.times() != b.times()) {
    throw std::invalid_argument("space-time operation: grid mismatch between operands");
  }
}

SpaceTimeField& SpaceTimeField::operator+=(const SpaceTimeField& other) {
  require_same_grid(*this, other);
  for (int m = 0; m < num_frames(); ++m) frame(m) += other.frame(m);
  return *this;
}

SpaceTimeField& SpaceTimeField::operator-=(const SpaceTimeField& other) {
  require_same_grid(*this, other);
  for (int m = 0; m < num_frames(); ++m) frame(m) -= other.frame(m);
  return *this;
}

SpaceTimeField& SpaceTimeField::operator*=(double s) {
  for (int m = 0; m < num_frames(); ++m) frame(m) *= s;
  return *this;
}

double inner_q(const SpaceTimeField& a, const SpaceTimeField& b) {
  require_same_grid(a, b);
  double acc = 0.0;
  for (int m = 0; m < a.num_steps(); ++m) {
    acc += a.dt(m) * a.frame(m).dot(b.frame(m));
  }
  return acc;
}

double norm_q(const SpaceTimeField& a) {
  double acc = 0.0;
  for (int m = 0; m < a.num_steps(); ++m) acc += a.dt(m) * a.frame(m).squaredNorm();
  return std::sqrt(acc);
}

double norm_linf_h(const SpaceTimeField& a) {
  double mx = 0.0;
  for (int m = 0; m < a.num_frames(); ++m) mx = std::max(mx, a.frame(m).norm());
  return mx;
}

}  // namespace chc
