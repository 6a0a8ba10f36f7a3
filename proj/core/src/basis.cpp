#include "chcontrol/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chc {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Synthesis matrix for one axis: entry (j,k) = e_k(x_j) with midpoint nodes
// x_j = (j + 1/2) L / m.  Midpoint nodes make the cosine family exactly
// orthogonal under the uniform quadrature weight L/m for all modes k < m.
Eigen::MatrixXd axis_synthesis(double length, int n_modes, int n_nodes) {
  Eigen::MatrixXd e(n_nodes, n_modes);
  const double c0 = 1.0 / std::sqrt(length);
  const double ck = std::sqrt(2.0 / length);
  for (int j = 0; j < n_nodes; ++j) {
    const double theta = (j + 0.5) / static_cast<double>(n_nodes);
    e(j, 0) = c0;
    for (int k = 1; k < n_modes; ++k) {
      e(j, k) = ck * std::cos(k * kPi * theta);
    }
  }
  return e;
}

}  // namespace

std::shared_ptr<const SpectralBasis> SpectralBasis::build(int dim,
                                                          std::array<double, 2> lengths,
                                                          std::array<int, 2> modes_per_axis,
                                                          double dealias_factor) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("SpectralBasis: dim must be 1 or 2");
  }
  if (dealias_factor < 1.0) {
    throw std::invalid_argument("SpectralBasis: dealias_factor must be >= 1");
  }
  for (int axis = 0; axis < dim; ++axis) {
    const auto a = static_cast<size_t>(axis);
    if (!(lengths[a] > 0.0)) {
      throw std::invalid_argument("SpectralBasis: domain lengths must be positive");
    }
    if (modes_per_axis[a] < 4) {
      throw std::invalid_argument(
          "SpectralBasis: at least 4 modes per axis are required (degenerate spectral resolution)");
    }
  }

  auto basis = std::shared_ptr<SpectralBasis>(new SpectralBasis());
  basis->dim_ = dim;
  basis->dealias_factor_ = dealias_factor;
  basis->measure_ = 1.0;
  basis->num_modes_ = 1;
  basis->num_padded_ = 1;
  for (int axis = 0; axis < 2; ++axis) {
    const auto a = static_cast<size_t>(axis);
    if (axis < dim) {
      basis->lengths_[a] = lengths[a];
      basis->modes_[a] = modes_per_axis[a];
      basis->padded_nodes_[a] =
          std::max(modes_per_axis[a],
                   static_cast<int>(std::ceil(dealias_factor * modes_per_axis[a])));
      basis->measure_ *= lengths[a];
      basis->num_modes_ *= modes_per_axis[a];
      basis->num_padded_ *= basis->padded_nodes_[a];
      basis->synth_[a] = axis_synthesis(lengths[a], modes_per_axis[a], modes_per_axis[a]);
      basis->synth_padded_[a] =
          axis_synthesis(lengths[a], modes_per_axis[a], basis->padded_nodes_[a]);
    } else {
      basis->lengths_[a] = 1.0;
      basis->modes_[a] = 1;
      basis->padded_nodes_[a] = 1;
      basis->synth_[a] = Eigen::MatrixXd::Ones(1, 1);
      basis->synth_padded_[a] = Eigen::MatrixXd::Ones(1, 1);
    }
  }
  basis->weight_ = basis->measure_ / basis->num_modes_;
  basis->padded_weight_ = basis->measure_ / basis->num_padded_;

  basis->eigenvalues_.resize(basis->num_modes_);
  const int n1 = basis->modes_[1];
  for (int k0 = 0; k0 < basis->modes_[0]; ++k0) {
    const double l0 = std::pow(k0 * kPi / basis->lengths_[0], 2);
    for (int k1 = 0; k1 < n1; ++k1) {
      const double l1 = (dim == 2) ? std::pow(k1 * kPi / basis->lengths_[1], 2) : 0.0;
      basis->eigenvalues_[k0 * n1 + k1] = l0 + l1;
    }
  }
  return basis;
}

std::vector<double> SpectralBasis::sorted_eigenvalues() const {
  std::vector<double> v(eigenvalues_.data(), eigenvalues_.data() + eigenvalues_.size());
  std::sort(v.begin(), v.end());
  return v;
}

Eigen::VectorXd SpectralBasis::apply_axes(const Eigen::VectorXd& in,
                                          const Eigen::MatrixXd& a0, const Eigen::MatrixXd& a1,
                                          bool transpose) const {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Index r_in = transpose ? a0.rows() : a0.cols();
  const Eigen::Index c_in = transpose ? a1.rows() : a1.cols();
  Eigen::Map<const RowMat> m_in(in.data(), r_in, c_in);
  RowMat out;
  if (transpose) {
    out = a0.transpose() * m_in * a1;
  } else {
    out = a0 * m_in * a1.transpose();
  }
  return Eigen::Map<const Eigen::VectorXd>(out.data(), out.size());
}

Eigen::VectorXd SpectralBasis::synthesize(const Eigen::VectorXd& coeffs) const {
  if (dim_ == 1) return synth_[0] * coeffs;
  return apply_axes(coeffs, synth_[0], synth_[1], /*transpose=*/false);
}

Eigen::VectorXd SpectralBasis::analyze(const Eigen::VectorXd& nodal) const {
  if (dim_ == 1) return weight_ * (synth_[0].transpose() * nodal);
  return weight_ * apply_axes(nodal, synth_[0], synth_[1], /*transpose=*/true);
}

Eigen::VectorXd SpectralBasis::synthesize_padded(const Eigen::VectorXd& coeffs) const {
  if (dim_ == 1) return synth_padded_[0] * coeffs;
  return apply_axes(coeffs, synth_padded_[0], synth_padded_[1], /*transpose=*/false);
}

Eigen::VectorXd SpectralBasis::analyze_padded(const Eigen::VectorXd& padded_nodal) const {
  if (dim_ == 1) return padded_weight_ * (synth_padded_[0].transpose() * padded_nodal);
  return padded_weight_ * apply_axes(padded_nodal, synth_padded_[0], synth_padded_[1],
                                     /*transpose=*/true);
}

std::array<double, 2> SpectralBasis::node_position(int flat_node, bool padded) const {
  const int n1 = padded ? padded_nodes_[1] : modes_[1];
  const int j0 = flat_node / n1;
  const int j1 = flat_node % n1;
  const int m0 = padded ? padded_nodes_[0] : modes_[0];
  std::array<double, 2> x{};
  x[0] = (j0 + 0.5) * lengths_[0] / m0;
  x[1] = (dim_ == 2) ? (j1 + 0.5) * lengths_[1] / n1 : 0.0;
  return x;
}

bool SpectralBasis::compatible_with(const SpectralBasis& other) const {
  if (this == &other) return true;
  return dim_ == other.dim_ && lengths_ == other.lengths_ && modes_ == other.modes_ &&
         padded_nodes_ == other.padded_nodes_;
}

}  // namespace chc
