#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "oscillon/basis.hpp"
#include "oscillon/coeffs.hpp"
#include "oscillon/state.hpp"

namespace oscillon {

/// f(s) = beta s - lambda_f |s|^{rho-1} s, applied pointwise through collocation.
struct NonlinearitySpec {
  double beta = 1.0;
  double lambda_f = 1.0;
  double rho = 4.0;
  /// Collocation refinement r (P = r (M + 1) - 1 nodes per axis); 1 is the plain grid.
  int refinement = 1;

  double f(double s) const {
    if (s == 0.0) return 0.0;
    return beta * s - lambda_f * std::pow(std::abs(s), rho - 1.0) * s;
  }
  /// Primitive int_0^s f.
  double primitive(double s) const {
    return 0.5 * beta * s * s - lambda_f * std::pow(std::abs(s), rho + 1.0) / (rho + 1.0);
  }
  /// Growth constant C in |f'(s)| <= C (1 + |s|^{rho-1}).
  double growth_constant() const { return std::abs(beta) + rho * lambda_f; }
};

/// Refinement ceil((rho + 1)/2) that resolves the products of an integer
/// power rho without aliasing back into the retained modes.
int dealiased_refinement(double rho);

/// Nemytskii operator u -> f(u) on a fixed collocation grid.
class NonlinearOperator {
public:
  NonlinearOperator(const NonlinearitySpec& spec, const SpectralBasis& basis);

  const NonlinearitySpec& spec() const { return spec_; }
  const Collocation& grid() const { return grid_; }

  Field apply(const Field& u) const;
  /// V(u) = int_Omega int_0^u f by the grid quadrature.
  double potential(const Field& u) const;

private:
  NonlinearitySpec spec_;
  Collocation grid_;
};

Field apply_f(const NonlinearitySpec& spec, const SpectralBasis& basis, const Field& u);
double potential(const NonlinearitySpec& spec, const SpectralBasis& basis, const Field& u);

/// |Omega| sup_s (f(s) s - eps s^2), closed form.
double c_epsilon(const NonlinearitySpec& spec, const SpectralBasis& basis, double eps);

/// |Omega| sup_s (int_0^s f - eps s^2), the constant in V(u) <= eps ||u||^2 + C.
double potential_constant(const NonlinearitySpec& spec, const SpectralBasis& basis, double eps);

/// (0, f(u) - omega(t) v).
State rhs_F(const NonlinearOperator& op, const OmegaModel& omega, double t, const State& w);
State rhs_F(const NonlinearitySpec& spec, const OmegaModel& omega, const SpectralBasis& basis, double t,
            const State& w);

/// The exponent pair of the local theory for a given (rho, s, alpha).
struct ExponentPair {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

/// Throws std::invalid_argument naming the violated condition when
/// (rho, s, alpha) is outside the admissible range for dimension N.
ExponentPair check_admissible(int dim, double rho, double s, double alpha);

/// ||(x, y)||_{E^theta} = ||x||_{X^{(1 + a theta)/2}} + ||y||_{X^{a theta/2}}.
double e_theta_norm(const SpectralBasis& basis, double alpha, double theta, const State& w);

struct NonlinearityBoundRow {
  double magnitude = 0.0;
  double max_ratio = 0.0;
};

struct NonlinearityBoundReport {
  ExponentPair exponents;
  std::vector<NonlinearityBoundRow> rows;
  double fitted_constant = 0.0; // max ratio over all samples
  bool stabilizes = false;      // last magnitude step raises the max ratio by at most 5%
};

/// Samples random states of the given magnitudes (E^{theta2} norm) and
/// reports max ||F||_{E^{theta1}} / (1 + ||w||^rho_{E^{theta2}}).
NonlinearityBoundReport nonlinearity_bound_report(const NonlinearitySpec& spec, const OmegaModel& omega,
                                                  const SpectralBasis& basis, double alpha, double s_ref,
                                                  int n_samples, const std::vector<double>& magnitudes,
                                                  std::uint64_t seed, double t = 0.0);

} // namespace oscillon
