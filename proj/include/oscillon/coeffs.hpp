#pragma once

#include <string>
#include <vector>

#include "oscillon/basis.hpp"

namespace oscillon {

/// Declared Hoelder data |g(t) - g(s)| <= constant |t - s|^exponent.
struct HolderData {
  double exponent = 1.0;
  double constant = 1.0;
};

/// Piecewise-linear user table, clamped outside its time range.
struct CoefficientTable {
  std::vector<double> times;
  std::vector<double> values;

  double value(double t) const;
  double slope(double t) const;
};

/// Damping omega(t): positive, nonincreasing, bounded by W.
struct OmegaModel {
  enum class Kind { Constant, LogisticDecay, Table };

  Kind kind = Kind::Constant;
  double min = 0.5;       // omega(+inf) for the logistic family
  double max = 2.0;       // omega(-inf); the value of the constant family
  double steepness = 0.1; // delta_omega
  HolderData holder{1.0, 1.0};
  CoefficientTable table;

  static OmegaModel constant(double value);
  static OmegaModel logistic_decay(double omega_min, double omega_max, double steepness);
};

/// Squared propagation speed mu(t): mu_min <= mu <= mu_max, increasing.
struct MuModel {
  enum class Kind { Constant, LogisticRise, Table };

  Kind kind = Kind::Constant;
  double min = 1.0;
  double max = 1.0;
  double steepness = 0.0; // delta_mu
  HolderData holder{1.0, 1.0};
  CoefficientTable table;

  static MuModel constant(double value);
  static MuModel logistic_rise(double mu_min, double mu_max, double steepness);
};

double eval_omega(const OmegaModel& model, double t);
double eval_omega_prime(const OmegaModel& model, double t);
/// W = sup_t omega(t).
double omega_sup(const OmegaModel& model);

double eval_mu(const MuModel& model, double t);
double eval_mu_prime(const MuModel& model, double t);
/// Tightest growth envelope vartheta(t) = mu'(t) / mu(t).
double mu_envelope(const MuModel& model, double t);
double mu_lower(const MuModel& model);
double mu_upper(const MuModel& model);

/// Every named constant of the energy estimates for one (alpha, basis, t0).
struct StructuralConstants {
  double alpha = 1.0;
  double t0 = 0.0;
  double W = 0.0;
  double omega_t0 = 0.0;
  double mu_min = 1.0;
  double mu_max = 1.0;
  double d0 = 1.0, d1 = 1.0, d2 = 1.0; // ||.|| <= d0 ||.||_{(1-a)/4} <= d1 ||.||_{1/4} <= d2 ||.||_{(1+a)/4}
  double d3 = 1.0, d4 = 1.0, d5 = 1.0; // ||.||_{(a-1)/4} <= d3 ||.|| <= d4 ||.||_{(1-a)/4} <= d5 ||.||_{(1+a)/4}
  double c1 = 1.0, c2 = 1.0;
  double C1 = 1.0, C2 = 1.0;
  double C_eps = 0.0;
  double eps = 0.0; // decay rate at t0
  double D1 = 1.0, D2 = 1.0, D3 = 0.0;
  double M0 = 1.0, M1 = 0.0;
  double R_absorb = 1.0;
};

StructuralConstants compute_constants(const OmegaModel& omega, const MuModel& mu, double alpha,
                                      const SpectralBasis& basis, double C_eps, double t0);

/// min{1, omega(t)/4, c1/(4(W+2)), d0^2/(3 d1^2)}.
double decay_rate(const OmegaModel& omega, const StructuralConstants& consts, double t);

struct AssumptionCheck {
  std::string name;
  bool pass = true;
  double worst = 0.0;   // worst sampled value of the checked quantity
  double limit = 0.0;   // the bound it is compared with
  double witness_t = 0.0;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  /// Empirical (1/4)-Hoelder constant of mu^{alpha/2} over sampled pairs.
  double mu_power_holder = 0.0;
  double epsilon = 0.0;
  double c1 = 0.0;

  bool all_pass() const;
  const AssumptionCheck* find(const std::string& name) const;
};

/// Uniform sampling grid [t_begin, t_end] with `count` points.
std::vector<double> uniform_grid(double t_begin, double t_end, int count);

/// Samples every structural assumption on `sample_grid`. The decay rate is
/// evaluated with c1 taken at the last grid time.
AssumptionReport check_assumptions(const OmegaModel& omega, const MuModel& mu, double alpha,
                                   const SpectralBasis& basis, const std::vector<double>& sample_grid);

/// Largest logistic steepness delta_mu (to relative precision 1e-6) for which
/// check_assumptions passes, keeping every other parameter of `mu` fixed.
double max_admissible_mu_steepness(const OmegaModel& omega, MuModel mu, double alpha,
                                   const SpectralBasis& basis, const std::vector<double>& sample_grid);

/// Closed-form (1/4)-Hoelder constant for mu^p, p real, from the declared
/// (gamma, kappa) data of mu and the bounds mu_min, mu_max.
double mu_power_holder_quarter(const MuModel& mu, double p);

} // namespace oscillon
