#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "oscillon/basis.hpp"
#include "oscillon/coeffs.hpp"

namespace oscillon {

template <typename Scalar>
using Block2T = Eigen::Matrix<Scalar, 2, 2>;
using Block2 = Block2T<double>;

/// One eigenmode of Lambda(t)^{+-alpha}: a real 2x2 matrix plus the inputs
/// that produced it.
template <typename Scalar>
struct ModeBlockT {
  Block2T<Scalar> m;
  Scalar alpha;
  Scalar mu;
  Scalar nu;
  double t = 0.0;
};
using ModeBlock = ModeBlockT<double>;

inline void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
}

inline void require_nu(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("mode eigenvalue nu must be positive");
}

/// Lambda^alpha on one mode for a frozen speed mu:
///   [ mu^{a/2} c nu^{a/2}              -mu^{(a-1)/2} s nu^{(a-1)/2} ]
///   [ mu^{(1+a)/2} s nu^{(1+a)/2}       mu^{a/2} c nu^{a/2}         ]
/// with c = cos(pi a/2), s = sin(pi a/2). At a = 1 the entries are set
/// exactly to [0, -1; mu nu, 0].
template <typename Scalar>
Block2T<Scalar> lambda_matrix(Scalar mu, Scalar alpha, Scalar nu) {
  using std::cos;
  using std::pow;
  using std::sin;
  Block2T<Scalar> b;
  if (alpha == Scalar(1)) {
    b << Scalar(0), Scalar(-1), mu * nu, Scalar(0);
    return b;
  }
  const Scalar half_pi_a = Scalar(M_PI) * alpha / Scalar(2);
  const Scalar c = cos(half_pi_a);
  const Scalar s = sin(half_pi_a);
  const Scalar mn = mu * nu;
  const Scalar diag = pow(mn, alpha / Scalar(2)) * c;
  b << diag, -pow(mn, (alpha - Scalar(1)) / Scalar(2)) * s, pow(mn, (Scalar(1) + alpha) / Scalar(2)) * s, diag;
  return b;
}

/// Lambda^{-alpha} on one mode:
///   [ mu^{-a/2} c nu^{-a/2}             mu^{(-1-a)/2} s nu^{(-1-a)/2} ]
///   [ -mu^{(1-a)/2} s nu^{(1-a)/2}      mu^{-a/2} c nu^{-a/2}         ]
/// which is [0, 1/(mu nu); -1, 0] at a = 1.
template <typename Scalar>
Block2T<Scalar> lambda_inverse_matrix(Scalar mu, Scalar alpha, Scalar nu) {
  using std::cos;
  using std::pow;
  using std::sin;
  Block2T<Scalar> b;
  if (alpha == Scalar(1)) {
    b << Scalar(0), Scalar(1) / (mu * nu), Scalar(-1), Scalar(0);
    return b;
  }
  const Scalar half_pi_a = Scalar(M_PI) * alpha / Scalar(2);
  const Scalar c = cos(half_pi_a);
  const Scalar s = sin(half_pi_a);
  const Scalar mn = mu * nu;
  const Scalar diag = pow(mn, -alpha / Scalar(2)) * c;
  b << diag, pow(mn, (Scalar(-1) - alpha) / Scalar(2)) * s, -pow(mn, (Scalar(1) - alpha) / Scalar(2)) * s, diag;
  return b;
}

ModeBlock lambda_block(double t, double alpha, double nu, const MuModel& mu_model);
ModeBlock lambda_inverse_block(double t, double alpha, double nu, const MuModel& mu_model);

/// Eigenvalues of -Lambda(t)^alpha on one mode,
/// e^{+-i pi (2 - a)/2} mu^{a/2} nu^{a/2}; first entry has positive imaginary part.
std::pair<std::complex<double>, std::complex<double>> spectrum(double t, double alpha, double nu,
                                                                const MuModel& mu_model);

struct QuadratureResult {
  ModeBlock block;
  double error_estimate = 0.0; // quadrature plus truncated tails, max over entries
  int intervals = 0;
  bool converged = false;
};

/// Lambda^{-alpha} from (sin pi a / pi) int_0^inf l^{-a} (l I + B1)^{-1} dl with
/// B1 the a = 1 block, by adaptive Gauss-Kronrod (7, 15) in y = log l.
QuadratureResult balakrishnan_block(double t, double alpha, double nu, const MuModel& mu_model, double quad_tol);

/// Y_t inner product weights per mode: |u|^2 (mu^{1/2} nu + 1) + |v|^2.
Block2 yt_metric_sqrt(double mu, double nu);

/// Spectral norm of `m` as an operator on (R^2, metric) given the Cholesky
/// factor `g` of the metric: || g m g^{-1} ||_2.
double weighted_spectral_norm(const Block2& m, const Block2& g);

struct AlphaLimitRow {
  double alpha = 0.0;
  double inverse_error = 0.0; // sup_k || Lambda^{-a} - Lambda^{-1} ||_{L(Y_t)} on mode k
  double inverse_argmax_nu = 0.0;
  double action_error = 0.0;  // || Lambda^a w - Lambda w ||_{Y_t}
};

/// Convergence table of Lambda(t)^{+-alpha} as alpha -> 1 for a fixed state.
std::vector<AlphaLimitRow> alpha_limit_report(double t, const Field& u, const Field& v, const MuModel& mu_model,
                                              const SpectralBasis& basis, const std::vector<double>& alphas);

struct HolderEstimate {
  double lhs = 0.0;
  double bound = 0.0;
  double constant = 0.0; // C in C |t - tau|^{1/4}
  bool holds = true;
};

/// sup over modes of the E^{theta1} operator norm of
/// [Lambda(t)^a - Lambda(tau)^a] Lambda(s_ref)^{-a}, against C |t - tau|^{1/4}.
/// The E^theta norm is the unsquared sum ||A^{(1+a th)/2} u|| + ||A^{a th/2} v||;
/// after conjugation the per-mode matrix does not depend on nu or theta, so
/// the induced norm is its largest absolute column sum.
HolderEstimate hoelder_operator_estimate(double t, double tau, double s_ref, double alpha, const MuModel& mu_model,
                                         const SpectralBasis& basis);

} // namespace oscillon
