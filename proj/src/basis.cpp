#include "oscillon/basis.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace oscillon {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Applies `op` (rows_out x rows_in) along `axis` of a row-major tensor whose
// extent along every axis before `axis` is `out_extent` (already transformed)
// and after it is `in_extent`.
Eigen::VectorXd contract_axis(const Eigen::VectorXd& data, int dim, int axis, int out_extent,
                              int in_extent, const Eigen::MatrixXd& op) {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto n_in = op.cols();
  const auto n_out = op.rows();
  const auto outer = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(out_extent), axis));
  const auto inner = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(in_extent), dim - axis - 1));
  Eigen::VectorXd result(outer * n_out * inner);
  if (inner == 1) {
    // Last axis: one product over all outer slices.
    Eigen::Map<RowMat>(result.data(), outer, n_out).noalias() =
        Eigen::Map<const RowMat>(data.data(), outer, n_in) * op.transpose();
    return result;
  }
  for (Eigen::Index o = 0; o < outer; ++o) {
    Eigen::Map<RowMat>(result.data() + o * n_out * inner, n_out, inner).noalias() =
        op * Eigen::Map<const RowMat>(data.data() + o * n_in * inner, n_in, inner);
  }
  return result;
}

} // namespace

SpectralBasis::SpectralBasis(int dim, int modes_per_axis) : dim_(dim), modes_(modes_per_axis) {
  if (dim < 1) throw std::invalid_argument("basis dimension must be >= 1");
  if (modes_per_axis < 1) throw std::invalid_argument("modes_per_axis must be >= 1");

  const std::size_t count = ipow(static_cast<std::size_t>(modes_per_axis), dim);
  std::vector<int> lex(count * static_cast<std::size_t>(dim));
  std::vector<double> nu(count);
  for (std::size_t flat = 0; flat < count; ++flat) {
    std::size_t rem = flat;
    double sum = 0.0;
    for (int a = dim - 1; a >= 0; --a) {
      const int n = static_cast<int>(rem % static_cast<std::size_t>(modes_per_axis)) + 1;
      rem /= static_cast<std::size_t>(modes_per_axis);
      lex[flat * static_cast<std::size_t>(dim) + static_cast<std::size_t>(a)] = n;
      sum += static_cast<double>(n) * n;
    }
    nu[flat] = sum;
  }

  // Flat row-major order is already lexicographic, so a stable sort keeps
  // ties in multi-index order.
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return nu[a] < nu[b]; });

  eigenvalues_.resize(static_cast<Eigen::Index>(count));
  indices_.resize(count * static_cast<std::size_t>(dim));
  tensor_offset_.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t src = order[k];
    eigenvalues_[static_cast<Eigen::Index>(k)] = nu[src];
    tensor_offset_[k] = src;
    std::copy_n(lex.begin() + static_cast<std::ptrdiff_t>(src * static_cast<std::size_t>(dim)), dim,
                indices_.begin() + static_cast<std::ptrdiff_t>(k * static_cast<std::size_t>(dim)));
  }
}

double SpectralBasis::nu_median() const {
  std::vector<double> v(eigenvalues_.data(), eigenvalues_.data() + eigenvalues_.size());
  return v[(v.size() - 1) / 2];
}

SpectralBasis build_basis(int dim, int modes_per_axis) { return SpectralBasis(dim, modes_per_axis); }

double embedding_constant(const SpectralBasis& basis, double theta_lo, double theta_hi) {
  if (theta_lo > theta_hi) {
    throw std::invalid_argument("embedding_constant: theta_lo must not exceed theta_hi");
  }
  return std::pow(basis.nu_min(), theta_lo - theta_hi);
}

Collocation::Collocation(const SpectralBasis& basis, int refinement)
    : basis_(basis), refinement_(refinement) {
  if (refinement < 1) throw std::invalid_argument("collocation refinement must be >= 1");
  const int m = basis.modes_per_axis();
  nodes_ = refinement * (m + 1) - 1;
  grid_size_ = ipow(static_cast<std::size_t>(nodes_), basis.dim());
  const double h = M_PI / (nodes_ + 1);
  cell_weight_ = std::pow(h, basis.dim());

  const double norm = std::sqrt(2.0 / M_PI);
  synth_.resize(nodes_, m);
  for (int j = 0; j < nodes_; ++j) {
    for (int n = 1; n <= m; ++n) {
      synth_(j, n - 1) = norm * std::sin(n * node(j));
    }
  }
  analyze_ = h * synth_.transpose();
}

GridValues Collocation::inverse(const Field& coeffs) const {
  require_length(basis_, coeffs.size());
  const int d = basis_.dim();
  const int m = basis_.modes_per_axis();
  Eigen::VectorXd tensor = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(m), d)));
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    tensor[static_cast<Eigen::Index>(basis_.tensor_offset(k))] = coeffs[static_cast<Eigen::Index>(k)];
  }
  for (int axis = 0; axis < d; ++axis) {
    tensor = contract_axis(tensor, d, axis, nodes_, m, synth_);
  }
  return tensor;
}

Field Collocation::forward(const GridValues& values) const {
  if (static_cast<std::size_t>(values.size()) != grid_size_) {
    throw std::invalid_argument("grid has " + std::to_string(values.size()) + " values, expected " +
                                std::to_string(grid_size_));
  }
  const int d = basis_.dim();
  const int m = basis_.modes_per_axis();
  Eigen::VectorXd tensor = values;
  for (int axis = 0; axis < d; ++axis) {
    tensor = contract_axis(tensor, d, axis, m, nodes_, analyze_);
  }
  Field coeffs(static_cast<Eigen::Index>(basis_.size()));
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    coeffs[static_cast<Eigen::Index>(k)] = tensor[static_cast<Eigen::Index>(basis_.tensor_offset(k))];
  }
  return coeffs;
}

GridValues inverse_transform(const SpectralBasis& basis, const Field& coeffs) {
  return Collocation(basis).inverse(coeffs);
}

Field forward_transform(const SpectralBasis& basis, const GridValues& values) {
  return Collocation(basis).forward(values);
}

} // namespace oscillon
