#include "oscillon/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "oscillon/random.hpp"

namespace oscillon {

namespace {

struct Trig {
  double c;
  double s;
};

Trig trig(double alpha) {
  if (alpha == 1.0) return {0.0, 1.0};
  return {std::cos(M_PI * alpha / 2.0), std::sin(M_PI * alpha / 2.0)};
}

double weighted_sum(const Eigen::VectorXd& w, const Field& a, const Field& b) {
  return (w.array() * a.array() * b.array()).sum();
}

} // namespace

EnergyFunctionals::EnergyFunctionals(const SpectralBasis& basis, const Models& models, double alpha, double eps)
    : basis_(basis), models_(models), alpha_(alpha), eps_(eps), op_(models.nonlin, basis) {
  require_alpha(alpha);
  w_hi_ = spectral_weights(basis, (1.0 + alpha) / 2.0);
  w_lo_ = spectral_weights(basis, (1.0 - alpha) / 2.0);
  w_q_ = spectral_weights(basis, 0.5);
  w_neg_ = spectral_weights(basis, (alpha - 1.0) / 2.0);
}

double EnergyFunctionals::energy(double t, const Field& u, const Field& ut) const {
  require_length(basis_, u.size());
  require_length(basis_, ut.size());
  const double mu = eval_mu(models_.mu, t);
  return std::pow(mu, (1.0 + alpha_) / 2.0) * weighted_sum(w_hi_, u, u) + u.squaredNorm() +
         std::pow(mu, (1.0 - alpha_) / 2.0) * weighted_sum(w_lo_, ut, ut);
}

Field EnergyFunctionals::velocity(double t, const State& w) const {
  return recover_velocity(w, t, alpha_, models_, basis_);
}

double EnergyFunctionals::state_energy(double t, const State& w) const { return energy(t, w.u, velocity(t, w)); }

double EnergyFunctionals::phi(double t, const Field& u, const Field& ut) const {
  const double mu = eval_mu(models_.mu, t);
  const double om = eval_omega(models_.omega, t);
  const auto [c, s] = trig(alpha_);
  const double mu_lo = std::pow(mu, (1.0 - alpha_) / 2.0);
  const double base = std::pow(mu, (1.0 + alpha_) / 2.0) * weighted_sum(w_hi_, u, u) +
                      mu_lo * weighted_sum(w_lo_, ut, ut) - 2.0 * s * op_.potential(u);
  const double bracket = 2.0 * std::sqrt(mu) * c * weighted_sum(w_q_, u, u) + s * om * u.squaredNorm() +
                         2.0 * mu_lo * weighted_sum(w_lo_, ut, u);
  return base + 2.0 * eps_ * bracket;
}

double EnergyFunctionals::lyapunov(double t, const State& w) const {
  require_length(basis_, w.u.size());
  require_length(basis_, w.v.size());
  const double mu = eval_mu(models_.mu, t);
  const double om = eval_omega(models_.omega, t);
  const auto [c, s] = trig(alpha_);
  // s A^{(a-1)/4} v - mu^{1/2} c A^{(1+a)/4} u, mode by mode.
  const Eigen::ArrayXd mixed = s * w_neg_.array().sqrt() * w.v.array() - std::sqrt(mu) * c * w_hi_.array().sqrt() * w.u.array();
  return std::pow(mu, (1.0 + alpha_) / 2.0) * weighted_sum(w_hi_, w.u, w.u) +
         std::pow(mu, (alpha_ - 1.0) / 2.0) * mixed.square().sum() - 2.0 * s * op_.potential(w.u) +
         2.0 * eps_ * s * om * w.u.squaredNorm() + 4.0 * eps_ * s * w.u.dot(w.v);
}

double EnergyFunctionals::product_norm_sq(const State& w) const {
  return weighted_sum(w_hi_, w.u, w.u) + weighted_sum(w_neg_, w.v, w.v);
}

EnergyReport EnergyFunctionals::report(double t, const State& w) const {
  const Field ut = velocity(t, w);
  EnergyReport r;
  r.t = t;
  r.E = energy(t, w.u, ut);
  r.Phi = phi(t, w.u, ut);
  r.L = lyapunov(t, w);
  r.u_hi = std::sqrt(weighted_sum(w_hi_, w.u, w.u));
  r.u_l2 = w.u.norm();
  r.ut_lo = std::sqrt(weighted_sum(w_lo_, ut, ut));
  r.product = std::sqrt(product_norm_sq(w));
  r.eps = eps_;
  return r;
}

double natural_energy(const SpectralBasis& basis, const Models& models, double alpha, double t, const Field& u,
                      const Field& ut) {
  return EnergyFunctionals(basis, models, alpha, 0.0).energy(t, u, ut);
}

double phi_functional(const SpectralBasis& basis, const Models& models, double alpha, double t, double eps,
                      const Field& u, const Field& ut) {
  return EnergyFunctionals(basis, models, alpha, eps).phi(t, u, ut);
}

double lyapunov_L(const SpectralBasis& basis, const Models& models, double alpha, double t, double eps,
                  const State& w) {
  return EnergyFunctionals(basis, models, alpha, eps).lyapunov(t, w);
}

StructuralConstants run_constants(const SpectralBasis& basis, const Models& models, double alpha, double t0) {
  const StructuralConstants k0 = compute_constants(models.omega, models.mu, alpha, basis, 0.0, t0);
  const double c_eps = std::max(c_epsilon(models.nonlin, basis, k0.eps), potential_constant(models.nonlin, basis, k0.eps));
  return compute_constants(models.omega, models.mu, alpha, basis, c_eps, t0);
}

namespace {

// v making u_t vanish: v_k = (mu nu)^{1/2} (c/s) u_k.
Field rest_velocity_partner(const Field& u, const SpectralBasis& basis, double mu, double alpha) {
  const auto [c, s] = trig(alpha);
  Field v(u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    v[k] = std::sqrt(mu * basis.eigenvalue(static_cast<std::size_t>(k))) * c / s * u[k];
  }
  return v;
}

State draw_state(CounterRng& rng, const SpectralBasis& basis, double decay, bool at_rest, double mu, double alpha) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  const Eigen::VectorXd weight = spectral_weights(basis, -decay);
  State w;
  w.u = rng.next_normals(n).cwiseProduct(weight);
  w.v = rng.next_normals(n).cwiseProduct(weight);
  if (at_rest) w.v = rest_velocity_partner(w.u, basis, mu, alpha);
  return w;
}

void scale_to_energy(State& w, const EnergyFunctionals& fn, double t, double energy) {
  const double e = fn.state_energy(t, w);
  if (e <= 0.0) return;
  const double f = std::sqrt(energy / e);
  w.u *= f;
  w.v *= f;
}

} // namespace

std::vector<State> generate_ensemble(const EnsembleSpec& spec, const EnergyFunctionals& fn, double t) {
  if (spec.count < 0) throw std::invalid_argument("ensemble count must be >= 0");
  if (spec.energy < 0.0) throw std::invalid_argument("ensemble energy must be >= 0");
  const double mu = eval_mu(fn.models().mu, t);
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) {
    CounterRng rng(spec.seed, (spec.stream << 16) + static_cast<std::uint64_t>(i));
    State w = draw_state(rng, fn.basis(), spec.spectral_decay, spec.at_rest, mu, fn.alpha());
    scale_to_energy(w, fn, t, spec.energy);
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<State> bound_samples(const EnergyFunctionals& fn, double t, int count, double energy_lo, double energy_hi,
                                 std::uint64_t seed) {
  if (!(energy_lo > 0.0 && energy_hi >= energy_lo)) throw std::invalid_argument("bad energy range");
  const double mu = eval_mu(fn.models().mu, t);
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    const double u01 = rng.next_uniform();
    const double energy = energy_lo * std::pow(energy_hi / energy_lo, u01);
    State w = draw_state(rng, fn.basis(), 0.0, i % 2 == 1, mu, fn.alpha());
    scale_to_energy(w, fn, t, energy);
    out.push_back(std::move(w));
  }
  return out;
}

NormEquivalence norm_equivalence_report(const EnergyFunctionals& fn, const StructuralConstants& k, double t,
                                        const std::vector<State>& samples) {
  NormEquivalence r;
  r.C1 = k.C1;
  r.C2 = k.C2;
  r.min_ratio = std::numeric_limits<double>::infinity();
  r.max_ratio = 0.0;
  for (const auto& w : samples) {
    const double q = fn.product_norm_sq(w);
    if (q == 0.0) continue;
    const double ratio = fn.state_energy(t, w) / q;
    r.min_ratio = std::min(r.min_ratio, ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
  }
  if (samples.empty()) r.min_ratio = 0.0;

  // Per mode both forms are 2x2: E_k = [[a + g (mc)^2, -g mc ps], [., g (ps)^2]],
  // Q_k = diag(nu^{(1+a)/2}, nu^{(a-1)/2}).
  const double mu = eval_mu(fn.models().mu, t);
  const double alpha = fn.alpha();
  const auto [c, s] = trig(alpha);
  r.sharp_lower = std::numeric_limits<double>::infinity();
  r.sharp_upper = 0.0;
  for (std::size_t i = 0; i < fn.basis().size(); ++i) {
    const double nu = fn.basis().eigenvalue(i);
    const double mn = mu * nu;
    const double a = std::pow(mn, (1.0 + alpha) / 2.0) + 1.0;
    const double g = std::pow(mn, (1.0 - alpha) / 2.0);
    const double mc = std::pow(mn, alpha / 2.0) * c;
    const double ps = std::pow(mn, (alpha - 1.0) / 2.0) * s;
    Eigen::Matrix2d E;
    E << a + g * mc * mc, -g * mc * ps, -g * mc * ps, g * ps * ps;
    const Eigen::Vector2d qinv(std::pow(nu, -(1.0 + alpha) / 4.0), std::pow(nu, (1.0 - alpha) / 4.0));
    const Eigen::Matrix2d S = qinv.asDiagonal() * E * qinv.asDiagonal();
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(S).eigenvalues();
    r.sharp_lower = std::min(r.sharp_lower, ev[0]);
    r.sharp_upper = std::max(r.sharp_upper, ev[1]);
  }
  return r;
}

bool TwoSidedBoundsReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.violations == 0; });
}

namespace {

void record(BoundCheck& b, double value, double limit, bool is_lower) {
  ++b.samples;
  const double gap = is_lower ? value - limit : limit - value;
  const double margin = gap / std::max(1.0, std::abs(limit));
  if (b.samples == 1 || margin < b.worst_margin) {
    b.worst_margin = margin;
    b.worst_value = value;
    b.worst_limit = limit;
  }
  if (margin < -1e-12) ++b.violations;
}

} // namespace

TwoSidedBoundsReport two_sided_bounds(const EnergyFunctionals& fn, const StructuralConstants& k, double t,
                                      const std::vector<State>& samples) {
  TwoSidedBoundsReport r;
  BoundCheck phi_lo{"phi_lower"}, phi_hi{"phi_upper"}, l_lo{"lyapunov_lower"}, l_hi{"lyapunov_upper"},
      e_lo{"energy_lower"}, e_hi{"energy_upper"};
  for (const auto& w : samples) {
    const Field ut = fn.velocity(t, w);
    const double E = fn.energy(t, w.u, ut);
    const double Phi = fn.phi(t, w.u, ut);
    const double L = fn.lyapunov(t, w);
    const double q = fn.product_norm_sq(w);
    record(phi_lo, Phi, k.c1 * E - 2.0 * k.C_eps, true);
    record(phi_hi, Phi, k.c2 * E + 2.0 * k.C_eps, false);
    record(l_lo, L, k.D1 * q - k.D3, true);
    record(l_hi, L, k.D2 * q + k.D3, false);
    record(e_lo, E, k.C1 * q, true);
    record(e_hi, E, k.C2 * q, false);
    r.identity_max_error = std::max(r.identity_max_error, std::abs(L - Phi) / std::max(1.0, std::abs(Phi)));
  }
  r.checks = {phi_lo, phi_hi, l_lo, l_hi, e_lo, e_hi};
  r.equivalence = norm_equivalence_report(fn, k, t, samples);
  return r;
}

DecayReport decay_estimate_check(const TrajectoryRecord& traj, const EnergyFunctionals& fn,
                                 const StructuralConstants& k, double tol_rel, double residual_slack) {
  if (traj.times.empty()) throw std::invalid_argument("decay_estimate_check: empty trajectory");
  DecayReport rep;
  rep.blew_up = traj.blew_up;
  const double tau = traj.times.front();
  const double e_tau = fn.state_energy(tau, traj.states.front());
  const double tol = tol_rel * e_tau;
  const double eps = fn.eps();
  rep.residual_limit = 16.0 * eps * k.C_eps + residual_slack;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.worst_residual_excess = -std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const State& w = traj.states[i];
    const Field ut = fn.velocity(t, w);
    DecayRow row;
    row.t = t;
    row.E = fn.energy(t, w.u, ut);
    row.Phi = fn.phi(t, w.u, ut);
    row.L = fn.lyapunov(t, w);
    row.bound = k.M0 * e_tau * std::exp(-decay_rate(fn.models().omega, k, t) * (t - tau)) + k.M1;
    row.margin = row.bound + tol - row.E;
    row.residual = std::numeric_limits<double>::quiet_NaN();
    if (row.margin < rep.worst_margin) {
      rep.worst_margin = row.margin;
      rep.worst_margin_t = t;
    }
    rep.rows.push_back(row);
  }
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    auto& row = rep.rows[i];
    const auto& next = rep.rows[i + 1];
    row.residual = (next.Phi - row.Phi) / (next.t - row.t) + eps * row.Phi;
    const double excess = row.residual - rep.residual_limit;
    if (excess > rep.worst_residual_excess) {
      rep.worst_residual_excess = excess;
      rep.worst_residual_t = row.t;
    }
  }
  if (rep.rows.size() < 2) rep.worst_residual_excess = -rep.residual_limit;
  const double t0 = rep.rows.back().t;
  rep.gronwall_excess = rep.rows.back().Phi - rep.rows.front().Phi * std::exp(-eps * (t0 - tau)) - 16.0 * k.C_eps;
  rep.bound_holds = rep.worst_margin >= 0.0 && !traj.blew_up;
  rep.residual_holds = rep.worst_residual_excess <= 0.0;
  return rep;
}

double pullback_norm(const State& w, const SpectralBasis& basis, double s) {
  return std::sqrt(sobolev_norm_sq(basis, w.u, s / 2.0) + sobolev_norm_sq(basis, w.v, (s - 1.0) / 2.0));
}

double hausdorff_semidistance(const std::vector<State>& a, const std::vector<State>& b, const SpectralBasis& basis,
                              double s) {
  if (a.empty()) return 0.0;
  if (b.empty()) return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd wu = spectral_weights(basis, s);
  const Eigen::VectorXd wv = spectral_weights(basis, s - 1.0);
  double sup = 0.0;
  for (const auto& x : a) {
    double inf = std::numeric_limits<double>::infinity();
    for (const auto& y : b) {
      const double d2 = (wu.array() * (x.u - y.u).array().square()).sum() +
                        (wv.array() * (x.v - y.v).array().square()).sum();
      inf = std::min(inf, d2);
    }
    sup = std::max(sup, inf);
  }
  return std::sqrt(sup);
}

double absorbing_entry_time(const StructuralConstants& k, double eps, double R) {
  if (!(eps > 0.0)) throw std::invalid_argument("absorbing_entry_time: eps must be positive");
  if (R <= 0.0) return 0.0;
  return std::max(0.0, std::log(k.M0 * R / (1.0 + k.M1)) / eps);
}

AbsorbingReport absorbing_experiment(const Integrator& integ, const EnergyFunctionals& fn,
                                     const StructuralConstants& k, double t_final, const EnsembleSpec& ens, double h,
                                     double pullback, double tol_rel) {
  AbsorbingReport rep;
  rep.R = ens.energy;
  rep.R_absorb = k.R_absorb;
  rep.theta = absorbing_entry_time(k, k.eps, ens.energy);
  const double span = pullback < 0.0 ? rep.theta + 1.0 : pullback;
  rep.tau = t_final - std::ceil(span / h - 1e-9) * h;
  if (span == 0.0) rep.tau = t_final;
  const auto members = generate_ensemble(ens, fn, rep.tau);
  for (const auto& w0 : members) {
    bool blew = false;
    const State w = rep.tau == t_final ? w0 : integ.evolve_to(w0, rep.tau, t_final, h, &blew);
    rep.blew_up = rep.blew_up || blew;
    rep.worst_norm_sq = std::max(rep.worst_norm_sq, fn.product_norm_sq(w));
  }
  rep.absorbed = !rep.blew_up && rep.worst_norm_sq <= rep.R_absorb * (1.0 + tol_rel);
  return rep;
}

double linear_spectral_gap(const SpectralBasis& basis, double mu, double omega, double alpha, double beta) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    Eigen::Matrix2d G = lambda_matrix(mu, alpha, basis.eigenvalue(i));
    G(1, 1) += omega;
    G(1, 0) -= beta;
    const auto ev = Eigen::EigenSolver<Eigen::Matrix2d>(G).eigenvalues();
    gap = std::min({gap, ev[0].real(), ev[1].real()});
  }
  return gap;
}

PullbackReport pullback_attraction_experiment(const Integrator& integ, const EnergyFunctionals& fn, double t_fixed,
                                              const std::vector<double>& taus, const EnsembleSpec& ens, double h,
                                              double s, double tol_abs) {
  if (taus.size() < 3) throw std::invalid_argument("pullback experiment needs at least 3 initial times");
  for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
    if (!(taus[i + 1] < taus[i])) throw std::invalid_argument("initial times must be strictly decreasing");
  }
  if (taus.front() > t_fixed) throw std::invalid_argument("initial times must not exceed t_fixed");

  PullbackReport rep;
  std::vector<std::vector<State>> images;
  for (double tau : taus) {
    std::vector<State> img;
    for (const auto& w0 : generate_ensemble(ens, fn, tau)) {
      bool blew = false;
      img.push_back(integ.evolve_to(w0, tau, t_fixed, h, &blew));
      rep.blew_up = rep.blew_up || blew;
    }
    images.push_back(std::move(img));
  }
  const auto& last = images.back();
  for (std::size_t i = 0; i < taus.size(); ++i) {
    PullbackRow row;
    row.tau = taus[i];
    row.semidistance = hausdorff_semidistance(images[i], last, fn.basis(), s);
    for (const auto& w : images[i]) row.max_norm = std::max(row.max_norm, pullback_norm(w, fn.basis(), s));
    rep.rows.push_back(row);
  }
  const std::size_t pre = taus.size() - 1; // rows[0 .. pre-1] compare against the last image
  for (std::size_t i = 0; i + 1 < pre; ++i) {
    if (rep.rows[i + 1].semidistance > rep.rows[i].semidistance + tol_abs) rep.monotone = false;
  }
  const double first = rep.rows.front().semidistance;
  const double final_pre = rep.rows[pre - 1].semidistance;
  rep.total_decrease = final_pre > 0.0 ? first / final_pre : std::numeric_limits<double>::infinity();
  const double d_a = rep.rows[pre - 2].semidistance;
  const double d_b = rep.rows[pre - 1].semidistance;
  if (d_a > 0.0 && d_b > 0.0) rep.measured_rate = std::log(d_a / d_b) / (taus[pre - 2] - taus[pre - 1]);

  const Models& m = fn.models();
  const bool linear = m.nonlin.lambda_f == 0.0 && m.mu.kind == MuModel::Kind::Constant &&
                      m.omega.kind == OmegaModel::Kind::Constant;
  if (linear) {
    rep.predicted_rate = linear_spectral_gap(fn.basis(), eval_mu(m.mu, 0.0), eval_omega(m.omega, 0.0), fn.alpha(),
                                             m.nonlin.beta);
  }
  return rep;
}

std::vector<TailRow> tail_energy_compactness(const std::vector<State>& states, const SpectralBasis& basis,
                                             const std::vector<double>& cutoffs) {
  if (states.empty()) throw std::invalid_argument("tail_energy_compactness: empty ensemble");
  std::vector<TailRow> rows;
  for (double cut : cutoffs) {
    TailRow row{cut, 0.0};
    for (const auto& w : states) {
      require_length(basis, w.u.size());
      double total = 0.0;
      double tail = 0.0;
      for (std::size_t k = 0; k < basis.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double e = w.u[i] * w.u[i] + w.v[i] * w.v[i];
        total += e;
        if (basis.eigenvalue(k) > cut) tail += e;
      }
      if (total > 0.0) row.fraction = std::max(row.fraction, tail / total);
    }
    rows.push_back(row);
  }
  return rows;
}

} // namespace oscillon
