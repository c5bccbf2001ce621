#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oscillon/basis.hpp"
#include "oscillon/coeffs.hpp"
#include "oscillon/dynamics.hpp"
#include "oscillon/nonlin.hpp"
#include "oscillon/state.hpp"

namespace oscillon {

/// Squared norms throughout: ||.||^2_{X^{(1+a)/4} x X^{(a-1)/4}} is what the
/// energy bounds compare against.
struct EnergyReport {
  double t = 0.0;
  double E = 0.0;
  double Phi = 0.0;
  double L = 0.0;
  double u_hi = 0.0;       // ||u||_{X^{(1+a)/4}}
  double u_l2 = 0.0;       // ||u||
  double ut_lo = 0.0;      // ||u_t||_{X^{(1-a)/4}}
  double product = 0.0;    // ||(u, v)||_{X^{(1+a)/4} x X^{(a-1)/4}}, unsquared
  double eps = 0.0;
};

/// Energy 𝓔, the functional Phi_alpha in (u, u_t) and the Lyapunov
/// functional L_alpha in (u, v), for frozen alpha and eps.
class EnergyFunctionals {
public:
  EnergyFunctionals(const SpectralBasis& basis, const Models& models, double alpha, double eps);

  const SpectralBasis& basis() const { return basis_; }
  const Models& models() const { return models_; }
  double alpha() const { return alpha_; }
  double eps() const { return eps_; }

  /// mu^{(1+a)/2} ||u||^2_{(1+a)/4} + ||u||^2 + mu^{(1-a)/2} ||u_t||^2_{(1-a)/4}.
  double energy(double t, const Field& u, const Field& ut) const;
  /// Energy with u_t recovered from (u, v).
  double state_energy(double t, const State& w) const;

  /// mu^{(1+a)/2}||u||^2_{(1+a)/4} + mu^{(1-a)/2}||u_t||^2_{(1-a)/4} - 2 s V(u)
  ///   + 2 eps [2 mu^{1/2} c ||u||^2_{1/4} + s omega ||u||^2
  ///            + 2 mu^{(1-a)/2} <A^{(1-a)/4} u_t, A^{(1-a)/4} u>].
  double phi(double t, const Field& u, const Field& ut) const;

  /// mu^{(1+a)/2}||u||^2_{(1+a)/4} + mu^{(a-1)/2}||s A^{(a-1)/4} v - mu^{1/2} c A^{(1+a)/4} u||^2
  ///   - 2 s V(u) + 2 eps s omega ||u||^2 + 4 eps s <u, v>.
  double lyapunov(double t, const State& w) const;

  Field velocity(double t, const State& w) const;
  double potential(const Field& u) const { return op_.potential(u); }
  double product_norm_sq(const State& w) const;

  EnergyReport report(double t, const State& w) const;

private:
  SpectralBasis basis_;
  Models models_;
  double alpha_;
  double eps_;
  NonlinearOperator op_;
  Eigen::VectorXd w_hi_;  // nu^{(1+a)/2}
  Eigen::VectorXd w_lo_;  // nu^{(1-a)/2}
  Eigen::VectorXd w_q_;   // nu^{1/2}
  Eigen::VectorXd w_neg_; // nu^{(a-1)/2}
};

double natural_energy(const SpectralBasis& basis, const Models& models, double alpha, double t, const Field& u,
                      const Field& ut);
double phi_functional(const SpectralBasis& basis, const Models& models, double alpha, double t, double eps,
                      const Field& u, const Field& ut);
double lyapunov_L(const SpectralBasis& basis, const Models& models, double alpha, double t, double eps,
                  const State& w);

/// Constants of one run: c1 and eps frozen at the end time t0, C_eps from
/// eps, then everything else.
StructuralConstants run_constants(const SpectralBasis& basis, const Models& models, double alpha, double t0);

/// Draws of the documented ensemble generator.
struct EnsembleSpec {
  int count = 20;
  double energy = 10.0;        // every member is scaled to this natural energy
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  double spectral_decay = 0.0; // coefficients carry nu^{-decay}
  bool at_rest = false;        // choose v so that u_t = 0
};

/// Member i uses stream (spec.stream << 16) + i: u then v drawn as standard
/// normals, weighted by nu^{-decay}, then scaled to spec.energy at time t.
std::vector<State> generate_ensemble(const EnsembleSpec& spec, const EnergyFunctionals& fn, double t);

struct NormEquivalence {
  double min_ratio = 0.0;   // over the samples, 𝓔/q
  double max_ratio = 0.0;
  double sharp_lower = 0.0; // exact inf over all states (per-mode 2x2 eigenproblem)
  double sharp_upper = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
};

/// 𝓔(u, u_t(u, v)) / (||u||^2_{(1+a)/4} + ||v||^2_{(a-1)/4}) over random states
/// and in closed form.
NormEquivalence norm_equivalence_report(const EnergyFunctionals& fn, const StructuralConstants& k, double t,
                                        const std::vector<State>& samples);

struct BoundCheck {
  std::string name;
  long samples = 0;
  long violations = 0;
  double worst_margin = 0.0; // min over samples of (upper - value) or (value - lower), relative to scale
  double worst_value = 0.0;
  double worst_limit = 0.0;
};

struct TwoSidedBoundsReport {
  std::vector<BoundCheck> checks;
  NormEquivalence equivalence;
  double identity_max_error = 0.0; // max |L - Phi(u, u_t)| / max(1, |Phi|)
  bool all_pass() const;
};

/// Phi-alpha, L-alpha and energy/norm two-sided bounds on `samples`.
TwoSidedBoundsReport two_sided_bounds(const EnergyFunctionals& fn, const StructuralConstants& k, double t,
                                      const std::vector<State>& samples);

/// Samples for the bound checks: half white (u, v) pairs, half states at rest,
/// energies log-uniform on [energy_lo, energy_hi].
std::vector<State> bound_samples(const EnergyFunctionals& fn, double t, int count, double energy_lo, double energy_hi,
                                 std::uint64_t seed);

struct DecayRow {
  double t = 0.0;
  double E = 0.0;
  double Phi = 0.0;
  double L = 0.0;
  double bound = 0.0;
  double margin = 0.0;   // bound + tol - E
  double residual = 0.0; // (Phi(t+h) - Phi(t))/h + eps Phi(t), NaN on the last row
};

struct DecayReport {
  std::vector<DecayRow> rows;
  double worst_margin = 0.0;
  double worst_margin_t = 0.0;
  double worst_residual_excess = 0.0; // max residual - (16 eps C_eps + slack)
  double worst_residual_t = 0.0;
  double gronwall_excess = 0.0;       // Phi(t0) - Phi(tau) e^{-eps (t0 - tau)} - 16 C_eps
  double residual_limit = 0.0;
  bool bound_holds = true;
  bool residual_holds = true;
  bool blew_up = false;
};

/// Checks 𝓔(t) <= M0 𝓔(tau) e^{-eps(t)(t - tau)} + M1 + tol at every record,
/// with tol = tol_rel 𝓔(tau), and the discrete Lyapunov inequality with
/// slack `residual_slack` per step.
DecayReport decay_estimate_check(const TrajectoryRecord& traj, const EnergyFunctionals& fn,
                                 const StructuralConstants& k, double tol_rel = 1e-6, double residual_slack = 0.0);

/// Sup over a of inf over b of the product distance.
double hausdorff_semidistance(const std::vector<State>& a, const std::vector<State>& b, const SpectralBasis& basis,
                              double s);

/// sqrt(||u||^2_{s/2} + ||v||^2_{(s-1)/2}).
double pullback_norm(const State& w, const SpectralBasis& basis, double s);

struct AbsorbingReport {
  double R = 0.0;
  double R_absorb = 0.0;
  double theta = 0.0;
  double tau = 0.0;
  double worst_norm_sq = 0.0; // max ||(u,v)(t_final)||^2 over the ensemble
  bool absorbed = true;
  bool blew_up = false;
};

/// Entry time max{0, eps^{-1} log(M0 R / (1 + M1))}.
double absorbing_entry_time(const StructuralConstants& k, double eps, double R);

/// Evolves the ensemble from tau = t_final - pullback to t_final and
/// compares against R_absorb. pullback < 0 selects theta + 1.
AbsorbingReport absorbing_experiment(const Integrator& integ, const EnergyFunctionals& fn,
                                     const StructuralConstants& k, double t_final, const EnsembleSpec& ens, double h,
                                     double pullback = -1.0, double tol_rel = 1e-6);

struct PullbackRow {
  double tau = 0.0;
  double semidistance = 0.0; // to the image from the last tau
  double max_norm = 0.0;     // largest member norm of the image
};

struct PullbackReport {
  std::vector<PullbackRow> rows;
  bool monotone = true;
  double total_decrease = 0.0; // first / last pre-final semidistance
  double measured_rate = 0.0;  // log ratio over the last two pre-final taus
  double predicted_rate = 0.0; // spectral gap when available, else 0
  bool blew_up = false;
};

PullbackReport pullback_attraction_experiment(const Integrator& integ, const EnergyFunctionals& fn, double t_fixed,
                                              const std::vector<double>& taus, const EnsembleSpec& ens, double h,
                                              double s, double tol_abs = 1e-12);

/// min over modes of -Re of the eigenvalues of -(Lambda^a + diag(0, omega))
/// for f = 0, constant mu and omega: the exact linear decay rate.
double linear_spectral_gap(const SpectralBasis& basis, double mu, double omega, double alpha, double beta = 0.0);

struct TailRow {
  double cutoff = 0.0;
  double fraction = 0.0; // sup over the ensemble of the l2 share of modes with nu > cutoff
};

std::vector<TailRow> tail_energy_compactness(const std::vector<State>& states, const SpectralBasis& basis,
                                             const std::vector<double>& cutoffs);

} // namespace oscillon
