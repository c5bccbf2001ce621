#pragma once

#include "oscillon/basis.hpp"

namespace oscillon {

/// Spectral coefficients of the first-order pair w = (u, v). The physical
/// velocity u_t is derived from (u, v), never stored.
template <typename Scalar>
struct StateT {
  FieldT<Scalar> u;
  FieldT<Scalar> v;

  static StateT zero(std::size_t n) {
    return {FieldT<Scalar>::Zero(static_cast<Eigen::Index>(n)), FieldT<Scalar>::Zero(static_cast<Eigen::Index>(n))};
  }
  bool all_finite() const { return u.allFinite() && v.allFinite(); }
  Scalar max_abs() const {
    return std::max(u.size() ? u.cwiseAbs().maxCoeff() : Scalar(0), v.size() ? v.cwiseAbs().maxCoeff() : Scalar(0));
  }
};
using State = StateT<double>;

} // namespace oscillon
