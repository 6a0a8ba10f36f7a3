#pragma once

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <vector>

namespace chc {

/// Neumann-Laplacian eigenbasis on an interval (0,L) or a rectangle
/// (0,L1)x(0,L2).  On each axis the eigenfunctions are the cosine family
///   e_0(x) = 1/sqrt(L),   e_k(x) = sqrt(2/L) cos(k pi x / L),  k >= 1,
/// normalized to unit L2 norm, with eigenvalues (k pi / L)^2.  Tensor modes
/// are stored flat with axis 0 major.
///
/// Two collocation grids are kept.  The primary grid has exactly one midpoint
/// node per retained mode and the discrete transform on it is bijective, so
/// nodal and coefficient views of a field are interchangeable without loss.
/// The padded grid oversamples by `dealias_factor` and is used for pointwise
/// nonlinear work and quadrature of non-quadratic integrands.
///
/// Instances are immutable after construction and safe to share across
/// threads; all transforms are const.
class SpectralBasis {
public:
  static std::shared_ptr<const SpectralBasis> build(int dim,
                                                    std::array<double, 2> lengths,
                                                    std::array<int, 2> modes_per_axis,
                                                    double dealias_factor = 1.5);

  int dim() const { return dim_; }
  double length(int axis) const { return lengths_[static_cast<size_t>(axis)]; }
  int modes(int axis) const { return modes_[static_cast<size_t>(axis)]; }
  int num_modes() const { return num_modes_; }
  int num_nodes() const { return num_modes_; }
  int num_padded_nodes() const { return num_padded_; }
  double dealias_factor() const { return dealias_factor_; }
  double domain_measure() const { return measure_; }

  double eigenvalue(int flat_mode) const { return eigenvalues_[flat_mode]; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  std::vector<double> sorted_eigenvalues() const;

  /// Uniform midpoint quadrature weight on the primary / padded grid.
  double quadrature_weight() const { return weight_; }
  double padded_weight() const { return padded_weight_; }

  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const;
  Eigen::VectorXd analyze(const Eigen::VectorXd& nodal) const;
  Eigen::VectorXd synthesize_padded(const Eigen::VectorXd& coeffs) const;
  Eigen::VectorXd analyze_padded(const Eigen::VectorXd& padded_nodal) const;

  /// Coordinates of a flat node index (second entry unused in 1D).
  std::array<double, 2> node_position(int flat_node, bool padded = false) const;

  /// Structural compatibility; Fields from compatible bases may be mixed.
  bool compatible_with(const SpectralBasis& other) const;

private:
  SpectralBasis() = default;

  int dim_ = 0;
  std::array<double, 2> lengths_{};
  std::array<int, 2> modes_{};
  std::array<int, 2> padded_nodes_{};
  double dealias_factor_ = 1.5;
  int num_modes_ = 0;
  int num_padded_ = 0;
  double measure_ = 0.0;
  double weight_ = 0.0;
  double padded_weight_ = 0.0;
  Eigen::VectorXd eigenvalues_;
  // per-axis synthesis matrices, entries e_k(x_j); primary grid is square
  std::array<Eigen::MatrixXd, 2> synth_;
  std::array<Eigen::MatrixXd, 2> synth_padded_;

  Eigen::VectorXd apply_axes(const Eigen::VectorXd& in,
                             const Eigen::MatrixXd& a0, const Eigen::MatrixXd& a1,
                             bool transpose) const;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

}  // namespace chc
