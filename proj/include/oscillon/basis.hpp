#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oscillon {

/// Spectral coefficients of a scalar function against the normalized
/// Dirichlet sine eigenfunctions, in the sorted order of a SpectralBasis.
template <typename Scalar>
using FieldT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Field = FieldT<double>;

/// Values of a scalar function on a tensor collocation grid, stored
/// row-major over the per-axis node indices (last axis fastest).
using GridValues = Eigen::VectorXd;

/// Dirichlet Laplacian eigenbasis of the box (0, pi)^d truncated to
/// `modes_per_axis` sine modes per axis.
///
/// Mode k carries the multi-index n(k) in {1..M}^d with eigenvalue
/// nu_k = n_1^2 + ... + n_d^2. Modes are sorted by eigenvalue, ties broken
/// by lexicographic multi-index order, so the index map is stable.
class SpectralBasis {
public:
  SpectralBasis(int dim, int modes_per_axis);

  int dim() const { return dim_; }
  int modes_per_axis() const { return modes_; }
  std::size_t size() const { return eigenvalues_.size(); }

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(std::size_t k) const { return eigenvalues_[static_cast<Eigen::Index>(k)]; }
  double nu_min() const { return eigenvalues_[0]; }
  double nu_max() const { return eigenvalues_[eigenvalues_.size() - 1]; }
  /// Median of the eigenvalue list (lower median for even counts).
  double nu_median() const;

  /// Multi-index of sorted mode k, entries in 1..M.
  std::span<const int> multi_index(std::size_t k) const {
    return {indices_.data() + k * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  /// Position of sorted mode k in the row-major M^d tensor layout.
  std::size_t tensor_offset(std::size_t k) const { return tensor_offset_[k]; }

  /// |Omega| = pi^d.
  double volume() const { return std::pow(M_PI, dim_); }

private:
  int dim_;
  int modes_;
  Eigen::VectorXd eigenvalues_;
  std::vector<int> indices_;
  std::vector<std::size_t> tensor_offset_;
};

SpectralBasis build_basis(int dim, int modes_per_axis);

/// Diagonal weight nu_k^{theta} for every mode.
template <typename Scalar = double>
FieldT<Scalar> spectral_weights(const SpectralBasis& basis, Scalar theta) {
  FieldT<Scalar> w(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    w[k] = std::pow(Scalar(basis.eigenvalues()[k]), theta);
  }
  return w;
}

inline void require_length(const SpectralBasis& basis, Eigen::Index n) {
  if (static_cast<std::size_t>(n) != basis.size()) {
    throw std::invalid_argument("field length " + std::to_string(n) +
                                " does not match basis size " + std::to_string(basis.size()));
  }
}

/// Squared X^theta norm: sum_k nu_k^{2 theta} |u_k|^2.
template <typename Derived>
typename Derived::Scalar sobolev_norm_sq(const SpectralBasis& basis,
                                         const Eigen::MatrixBase<Derived>& u,
                                         typename Derived::Scalar theta) {
  using Scalar = typename Derived::Scalar;
  require_length(basis, u.size());
  Scalar acc(0);
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    acc += std::pow(Scalar(basis.eigenvalues()[k]), Scalar(2) * theta) * u[k] * u[k];
  }
  return acc;
}

/// ||u||_{X^theta} = (sum_k nu_k^{2 theta} |u_k|^2)^{1/2}; theta = 0 is the L^2 norm.
template <typename Derived>
typename Derived::Scalar sobolev_norm(const SpectralBasis& basis,
                                      const Eigen::MatrixBase<Derived>& u,
                                      typename Derived::Scalar theta) {
  using std::sqrt;
  return sqrt(sobolev_norm_sq(basis, u, theta));
}

/// <A^theta u, A^theta w> on the truncation.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar sobolev_inner(const SpectralBasis& basis,
                                        const Eigen::MatrixBase<DerivedA>& u,
                                        const Eigen::MatrixBase<DerivedB>& w,
                                        typename DerivedA::Scalar theta) {
  using Scalar = typename DerivedA::Scalar;
  require_length(basis, u.size());
  require_length(basis, w.size());
  Scalar acc(0);
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    acc += std::pow(Scalar(basis.eigenvalues()[k]), Scalar(2) * theta) * u[k] * w[k];
  }
  return acc;
}

/// Sharp constant c with ||u||_{X^lo} <= c ||u||_{X^hi} on the truncation,
/// namely nu_min^{lo - hi}; equality holds on the lowest mode.
double embedding_constant(const SpectralBasis& basis, double theta_lo, double theta_hi);

/// Sine-collocation grid with `nodes_per_axis` interior nodes
/// x_j = j pi / (P + 1), j = 1..P, per axis.
///
/// With P = M the transform pair is a bijection on the truncation. Larger P
/// (refined or dealiased grids) evaluate the same modes on more points and
/// project back with the matching quadrature.
class Collocation {
public:
  /// Refinement r gives P = r (M + 1) - 1 nodes per axis, so grids nest.
  explicit Collocation(const SpectralBasis& basis, int refinement = 1);

  int nodes_per_axis() const { return nodes_; }
  int refinement() const { return refinement_; }
  std::size_t grid_size() const { return grid_size_; }
  /// Quadrature weight of a single grid point, (pi / (P + 1))^d.
  double cell_weight() const { return cell_weight_; }
  const SpectralBasis& basis() const { return basis_; }

  /// Node coordinate x_j for 0-based j.
  double node(int j) const { return M_PI * (j + 1) / (nodes_ + 1); }

  GridValues inverse(const Field& coeffs) const;
  Field forward(const GridValues& values) const;

  /// Quadrature of grid values over the box.
  double integrate(const GridValues& values) const { return cell_weight_ * values.sum(); }

private:
  SpectralBasis basis_;
  int refinement_;
  int nodes_;
  std::size_t grid_size_;
  double cell_weight_;
  Eigen::MatrixXd synth_;   // P x M, sqrt(2/pi) sin(n x_j)
  Eigen::MatrixXd analyze_; // M x P, quadrature-weighted transpose
};

/// Convenience wrappers on the native (P = M) grid.
GridValues inverse_transform(const SpectralBasis& basis, const Field& coeffs);
Field forward_transform(const SpectralBasis& basis, const GridValues& values);

} // namespace oscillon
