#pragma once

#include "chcontrol/basis.hpp"

#include <functional>
#include <vector>

namespace chc {

/// Scalar function on the spatial domain, stored as one coefficient per
/// retained mode.  The nodal view on the primary grid is lossless.
class Field {
public:
  Field() = default;
  explicit Field(BasisPtr basis);  // zero field
  static Field from_coeffs(BasisPtr basis, Eigen::VectorXd coeffs);
  static Field from_nodal(const BasisPtr& basis, const Eigen::VectorXd& nodal);
  static Field constant(const BasisPtr& basis, double value);
  /// Sample an (x[, y]) -> value function on the primary grid and project.
  static Field from_function(const BasisPtr& basis,
                             const std::function<double(double, double)>& f);

  const BasisPtr& basis() const { return basis_; }
  bool empty() const { return basis_ == nullptr; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  Eigen::VectorXd nodal() const { return basis_->synthesize(coeffs_); }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

private:
  BasisPtr basis_;
  Eigen::VectorXd coeffs_;
};

void require_same_basis(const Field& a, const Field& b);

double mean(const Field& f);
double norm_h(const Field& f);             // L2 norm
double inner(const Field& a, const Field& b);
double grad_norm_sq(const Field& f);
double norm_v(const Field& f);             // H1 norm
double linf_norm(const Field& f);          // max |f| on the primary grid
Field laplacian(const Field& f);

/// Inverse Neumann Laplacian on zero-mean fields: coefficientwise division by
/// the eigenvalue, zero constant mode.  Rejects inputs with nonzero mean.
Field inv_neumann_laplacian(const Field& f);

/// Dual norm: sqrt( sum_{k!=0} c_k^2/lambda_k + mean^2 ).
double dual_norm(const Field& f);

/// Time-indexed family of Fields on a shared basis and strictly increasing
/// time grid.  Control-type fields are read as piecewise constant in time:
/// frame m holds on [t_m, t_{m+1}), and the final frame only pads the shape.
class SpaceTimeField {
public:
  SpaceTimeField() = default;
  SpaceTimeField(BasisPtr basis, std::vector<double> times);  // zero frames
  static SpaceTimeField constant(const BasisPtr& basis, const std::vector<double>& times,
                                 double value);
  static SpaceTimeField from_frames(BasisPtr basis, std::vector<double> times,
                                    std::vector<Eigen::VectorXd> frames);
  /// Sample an (x, y, t) -> value function at every (node, time node) pair.
  static SpaceTimeField from_function(
      const BasisPtr& basis, const std::vector<double>& times,
      const std::function<double(double, double, double)>& f);

  const BasisPtr& basis() const { return basis_; }
  bool empty() const { return basis_ == nullptr; }
  const std::vector<double>& times() const { return times_; }
  int num_frames() const { return static_cast<int>(frames_.size()); }
  int num_steps() const { return num_frames() - 1; }
  double dt(int m) const { return times_[static_cast<size_t>(m) + 1] - times_[static_cast<size_t>(m)]; }
  const Eigen::VectorXd& frame(int m) const { return frames_[static_cast<size_t>(m)]; }
  Eigen::VectorXd& frame(int m) { return frames_[static_cast<size_t>(m)]; }
  Field frame_field(int m) const { return Field::from_coeffs(basis_, frames_[static_cast<size_t>(m)]); }

  SpaceTimeField& operator+=(const SpaceTimeField& other);
  SpaceTimeField& operator-=(const SpaceTimeField& other);
  SpaceTimeField& operator*=(double s);
  friend SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b) { return a += b; }
  friend SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b) { return a -= b; }
  friend SpaceTimeField operator*(double s, SpaceTimeField a) { return a *= s; }

private:
  BasisPtr basis_;
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> frames_;
};

void require_same_grid(const SpaceTimeField& a, const SpaceTimeField& b);

/// Piecewise-constant-in-time L2(Q) inner product over frames 0..M-1.
double inner_q(const SpaceTimeField& a, const SpaceTimeField& b);
double norm_q(const SpaceTimeField& a);
/// max over time nodes of the spatial L2 norm.
double norm_linf_h(const SpaceTimeField& a);

}  // namespace chc
