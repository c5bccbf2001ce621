#include "oscillon/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "oscillon/fracop.hpp"
#include "oscillon/io.hpp"
#include "oscillon/random.hpp"

namespace oscillon {

using nlohmann::json;

namespace {

// JSON cannot carry inf/nan; report them as strings.
json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string out_path(const ExperimentConfig& cfg, const std::string& file) {
  return (std::filesystem::path(cfg.output.dir) / file).string();
}

json scheme_json(const ExperimentConfig& cfg) {
  return {{"alpha", cfg.scheme.alpha}, {"s", cfg.scheme.s},     {"h", cfg.scheme.h},
          {"tau", cfg.scheme.tau},     {"T", cfg.scheme.T},     {"t_final", cfg.scheme.t_final()},
          {"seed", cfg.scheme.seed},   {"dim", cfg.dim},        {"modes", cfg.modes},
          {"mu_steepness", cfg.models.mu.steepness}};
}

// Relative max-entry distance.
double rel_error(const Block2& a, const Block2& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
}

} // namespace

IdentitySuite operator_identity_suite(const MuModel& mu, int count, std::uint64_t seed) {
  IdentitySuite r;
  for (int i = 0; i < count; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    // alpha in (0, 1], every eighth draw exactly 1.
    const double alpha = i % 8 == 7 ? 1.0 : 1e-3 + (1.0 - 1e-3) * rng.next_uniform();
    const double t = -200.0 + 400.0 * rng.next_uniform();
    double nu = 0.0;
    for (int j = 0; j < 3; ++j) {
      const int n = 1 + static_cast<int>(32.0 * rng.next_uniform());
      nu += static_cast<double>(n * n);
    }
    const ModeBlock b = lambda_block(t, alpha, nu, mu);
    const ModeBlock bi = lambda_inverse_block(t, alpha, nu, mu);
    const double m = b.mu * nu;
    r.inverse_error = std::max(r.inverse_error, (b.m * bi.m - Block2::Identity()).cwiseAbs().maxCoeff());
    const double det = std::pow(m, alpha);
    r.det_error = std::max(r.det_error, std::abs(b.m.determinant() - det) / det);
    const double trace = 2.0 * std::pow(m, alpha / 2.0) * std::cos(M_PI * alpha / 2.0);
    r.trace_error = std::max(r.trace_error, std::abs(b.m.trace() - trace) / std::sqrt(det));
    const auto [lp, lm] = spectrum(t, alpha, nu, mu);
    const auto ev = Eigen::EigenSolver<Block2>(-b.m).eigenvalues();
    const std::complex<double> e_hi = ev[0].imag() >= ev[1].imag() ? ev[0] : ev[1];
    const std::complex<double> e_lo = ev[0].imag() >= ev[1].imag() ? ev[1] : ev[0];
    const double scale = std::abs(lp);
    r.spectrum_error = std::max({r.spectrum_error, std::abs(lp - e_hi) / scale, std::abs(lm - e_lo) / scale});
    ++r.triples;
  }
  r.pass = r.triples >= 1000 && r.inverse_error <= 1e-12 && r.det_error <= 1e-12 && r.trace_error <= 1e-12 &&
           r.spectrum_error <= 1e-10;
  return r;
}

QuadratureSuite balakrishnan_suite(const MuModel& mu, int per_alpha, std::uint64_t seed, double quad_tol) {
  QuadratureSuite r;
  for (int a = 1; a <= 9; ++a) {
    const double alpha = 0.1 * a;
    for (int i = 0; i < per_alpha; ++i) {
      CounterRng rng(seed, static_cast<std::uint64_t>(100 * a + i));
      QuadratureRow row;
      row.alpha = alpha;
      row.t = -50.0 + 100.0 * rng.next_uniform();
      row.nu = std::exp(std::log(1e4) * rng.next_uniform());
      const QuadratureResult q = balakrishnan_block(row.t, alpha, row.nu, mu, quad_tol);
      const ModeBlock exact = lambda_inverse_block(row.t, alpha, row.nu, mu);
      row.error = rel_error(q.block.m, exact.m);
      row.error_estimate = q.error_estimate;
      row.intervals = q.intervals;
      r.worst = std::max(r.worst, row.error);
      r.rows.push_back(row);
    }
  }
  r.pass = r.worst <= 1e-6;
  return r;
}

AlphaLimitSuite alpha_limit_suite(const MuModel& mu, const SpectralBasis& basis, double t,
                                  const std::vector<double>& alphas) {
  const Eigen::VectorXd nu2 = spectral_weights(basis, -2.0);
  const Field u = nu2;
  const Field v = 0.5 * nu2;
  AlphaLimitSuite r;
  r.rows = alpha_limit_report(t, u, v, mu, basis, alphas);
  r.strictly_decreasing = true;
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    if (!(r.rows[i].inverse_error < r.rows[i - 1].inverse_error)) r.strictly_decreasing = false;
    if (!(r.rows[i].action_error < r.rows[i - 1].action_error)) r.strictly_decreasing = false;
  }
  r.inverse_ratio = r.rows.back().inverse_error / r.rows.front().inverse_error;
  r.action_ratio = r.rows.back().action_error / r.rows.front().action_error;
  return r;
}

RichardsonResult richardson_order(const Integrator& integ, const State& w0, double tau, double t_end, double h) {
  const State a = integ.evolve_to(w0, tau, t_end, h);
  const State b = integ.evolve_to(w0, tau, t_end, h / 2.0);
  const State c = integ.evolve_to(w0, tau, t_end, h / 4.0);
  const auto dist = [](const State& x, const State& y) {
    return std::sqrt((x.u - y.u).squaredNorm() + (x.v - y.v).squaredNorm());
  };
  RichardsonResult r;
  r.e_coarse = dist(a, b);
  r.e_fine = dist(b, c);
  r.order = std::log2(r.e_coarse / r.e_fine);
  return r;
}

Setup::Setup(const ExperimentConfig& finalized)
    : cfg(finalized),
      basis(finalized.basis()),
      consts(run_constants(basis, finalized.models, finalized.scheme.alpha, finalized.scheme.t_final())),
      assumptions(check_assumptions(finalized.models.omega, finalized.models.mu, finalized.scheme.alpha, basis,
                                    finalized.sample_grid())),
      integ(basis, finalized.models, finalized.scheme.alpha),
      fn(basis, finalized.models, finalized.scheme.alpha, consts.eps) {}

EnsembleSpec Setup::ensemble(double energy) const {
  EnsembleSpec e;
  e.count = cfg.params.ensemble;
  e.energy = energy;
  e.seed = cfg.scheme.seed;
  e.spectral_decay = cfg.params.spectral_decay;
  return e;
}

json to_json(const StructuralConstants& k) {
  return {{"alpha", k.alpha}, {"t0", k.t0},     {"W", k.W},         {"omega_t0", k.omega_t0}, {"mu_min", k.mu_min},
          {"mu_max", k.mu_max}, {"d0", k.d0},   {"d1", k.d1},       {"d2", k.d2},             {"d3", k.d3},
          {"d4", k.d4},       {"d5", k.d5},     {"c1", k.c1},       {"c2", k.c2},             {"C1", k.C1},
          {"C2", k.C2},       {"C_eps", k.C_eps}, {"eps", k.eps},   {"D1", k.D1},             {"D2", k.D2},
          {"D3", k.D3},       {"M0", k.M0},     {"M1", k.M1},       {"R_absorb", k.R_absorb}};
}

json to_json(const AssumptionReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"worst", num(c.worst)},
                      {"limit", num(c.limit)},
                      {"witness_t", num(c.witness_t)},
                      {"detail", c.detail}});
  }
  return {{"all_pass", r.all_pass()},
          {"checks", checks},
          {"mu_power_holder", num(r.mu_power_holder)},
          {"epsilon", num(r.epsilon)},
          {"c1", num(r.c1)}};
}

namespace {

int require_assumptions(const Setup& s, json& report) {
  report["assumptions"] = to_json(s.assumptions);
  return s.assumptions.all_pass() ? kExitPass : kExitConfigError;
}

json assumption_error(const Setup& s) {
  std::string failed;
  for (const auto& c : s.assumptions.checks) {
    if (!c.pass) failed += (failed.empty() ? "" : ", ") + c.name;
  }
  return {{"status", "config_error"}, {"key", "assumptions"}, {"message", "assumption checks failed: " + failed}};
}

} // namespace

RunResult run_verify_operator(const ExperimentConfig& cfg) {
  RunResult res;
  const SpectralBasis basis = cfg.basis();
  const MuModel& mu = cfg.models.mu;
  const std::uint64_t seed = cfg.scheme.seed;

  const IdentitySuite id = operator_identity_suite(mu, cfg.params.identity_triples, seed);
  const QuadratureSuite quad = balakrishnan_suite(mu, 10, seed, cfg.params.quad_tol);
  const AlphaLimitSuite lim = alpha_limit_suite(mu, basis, cfg.scheme.t_final(), cfg.params.limit_alphas);

  // Hoelder estimate on a few pairs around the final time.
  const double t1 = cfg.scheme.t_final();
  json holder = json::array();
  bool holder_ok = true;
  for (double dt : {1e-3, 1e-1, 1.0, 10.0}) {
    const HolderEstimate e = hoelder_operator_estimate(t1, t1 - dt, t1, cfg.scheme.alpha, mu, basis);
    holder_ok = holder_ok && e.holds;
    holder.push_back({{"t", t1}, {"tau", t1 - dt}, {"lhs", e.lhs}, {"bound", e.bound}, {"C", e.constant},
                      {"holds", e.holds}});
  }

  CsvTable qcsv{"balakrishnan quadrature vs closed form Lambda^{-alpha}; error relative to max entry",
                {"alpha", "t", "nu", "error", "error_estimate", "intervals"}, {}};
  for (const auto& r : quad.rows) qcsv.add_row({r.alpha, r.t, r.nu, r.error, r.error_estimate, double(r.intervals)});
  qcsv.write(out_path(cfg, "balakrishnan.csv"));

  CsvTable lcsv{"alpha -> 1 errors; inverse: sup_k operator norm on Y_t; action: Y_t norm on the state nu^-2 (1, 1/2)",
                {"alpha", "inverse_error", "inverse_argmax_nu", "action_error"}, {}};
  for (const auto& r : lim.rows) lcsv.add_row({r.alpha, r.inverse_error, r.inverse_argmax_nu, r.action_error});
  lcsv.write(out_path(cfg, "alpha_limit.csv"));

  res.report = {{"experiment", "verify-operator"},
                {"config", scheme_json(cfg)},
                {"identities",
                 {{"triples", id.triples},
                  {"inverse_error", id.inverse_error},
                  {"det_error", id.det_error},
                  {"trace_error", id.trace_error},
                  {"spectrum_error", id.spectrum_error},
                  {"pass", id.pass}}},
                {"balakrishnan", {{"cases", quad.rows.size()}, {"worst_error", quad.worst}, {"pass", quad.pass}}},
                {"alpha_limit",
                 {{"strictly_decreasing", lim.strictly_decreasing},
                  {"inverse_ratio", lim.inverse_ratio},
                  {"action_ratio", lim.action_ratio}}},
                {"hoelder", holder}};
  const bool pass = id.pass && quad.pass && lim.strictly_decreasing && holder_ok;
  res.report["pass"] = pass;
  res.exit_code = pass ? kExitPass : kExitCheckFail;
  return res;
}

RunResult run_check_assumptions(const ExperimentConfig& cfg) {
  RunResult res;
  const Setup s(cfg);
  res.report = {{"experiment", "check-assumptions"},
                {"config", scheme_json(cfg)},
                {"assumptions", to_json(s.assumptions)},
                {"constants", to_json(s.consts)}};
  try {
    const ExponentPair ex = check_admissible(cfg.dim, cfg.models.nonlin.rho, cfg.scheme.s, cfg.scheme.alpha);
    res.report["exponents"] = {{"theta1", ex.theta1}, {"theta2", ex.theta2}};
  } catch (const std::invalid_argument& e) {
    res.report["exponents"] = {{"error", e.what()}};
  }
  CsvTable csv{"assumption checks; pass is 1 or 0", {"pass", "worst", "limit", "witness_t"}, {}};
  for (const auto& c : s.assumptions.checks) csv.add_row({c.pass ? 1.0 : 0.0, c.worst, c.limit, c.witness_t});
  csv.comment += "; rows in order:";
  for (const auto& c : s.assumptions.checks) csv.comment += " " + c.name;
  csv.write(out_path(cfg, "assumptions.csv"));
  res.report["pass"] = s.assumptions.all_pass();
  res.exit_code = s.assumptions.all_pass() ? kExitPass : kExitCheckFail;
  return res;
}

RunResult run_simulate(const ExperimentConfig& cfg) {
  RunResult res;
  const Setup s(cfg);
  const auto members = generate_ensemble(s.ensemble(cfg.params.energy), s.fn, cfg.scheme.tau);
  const TrajectoryRecord rec = s.integ.evolve(members.front(), cfg.scheme.tau, cfg.scheme.t_final(), cfg.scheme.h,
                                              cfg.scheme.stride);
  CsvTable csv{"trajectory of ensemble member 0; norms unsquared; eps frozen at t_final",
               {"t", "E", "Phi", "L", "u_hi", "u_l2", "ut_lo", "product"}, {}};
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    const EnergyReport e = s.fn.report(rec.times[i], rec.states[i]);
    csv.add_row({e.t, e.E, e.Phi, e.L, e.u_hi, e.u_l2, e.ut_lo, e.product});
  }
  csv.write(out_path(cfg, "trajectory.csv"));
  if (!cfg.output.dump.empty()) write_state_dump(cfg.output.dump, s.basis, rec);
  res.report = {{"experiment", "simulate"},
                {"config", scheme_json(cfg)},
                {"records", rec.times.size()},
                {"blew_up", rec.blew_up},
                {"blow_up_time", rec.blew_up ? num(rec.blow_up_time) : json(nullptr)},
                {"final_energy", num(s.fn.state_energy(rec.times.back(), rec.states.back()))}};
  res.report["pass"] = !rec.blew_up;
  res.exit_code = rec.blew_up ? kExitBlowUp : kExitPass;
  return res;
}

RunResult run_energy_report(const ExperimentConfig& cfg) {
  RunResult res;
  const Setup s(cfg);
  res.report = {{"experiment", "energy-report"}, {"config", scheme_json(cfg)}, {"constants", to_json(s.consts)}};
  if (require_assumptions(s, res.report) != kExitPass) {
    res.report["error"] = assumption_error(s);
    res.exit_code = kExitConfigError;
    return res;
  }
  const double t = cfg.scheme.t_final();
  const auto samples = bound_samples(s.fn, t, cfg.params.bound_samples, cfg.params.bound_energy_lo,
                                     cfg.params.bound_energy_hi, cfg.scheme.seed);
  const TwoSidedBoundsReport b = two_sided_bounds(s.fn, s.consts, t, samples);
  json checks = json::array();
  for (const auto& c : b.checks) {
    checks.push_back({{"name", c.name},
                      {"samples", c.samples},
                      {"violations", c.violations},
                      {"worst_margin", num(c.worst_margin)},
                      {"worst_value", num(c.worst_value)},
                      {"worst_limit", num(c.worst_limit)}});
  }
  CsvTable csv{"bound samples at t_final; q = squared product norm; odd samples start at rest",
               {"sample", "E", "Phi", "L", "q", "phi_lo", "phi_hi", "l_lo", "l_hi", "e_lo", "e_hi"}, {}};
  const auto& k = s.consts;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const EnergyReport e = s.fn.report(t, samples[i]);
    const double q = e.product * e.product;
    csv.add_row({double(i), e.E, e.Phi, e.L, q, k.c1 * e.E - 2 * k.C_eps, k.c2 * e.E + 2 * k.C_eps, k.D1 * q - k.D3,
                 k.D2 * q + k.D3, k.C1 * q, k.C2 * q});
  }
  csv.write(out_path(cfg, "energy_bounds.csv"));
  const auto& eq = b.equivalence;
  res.report["bounds"] = checks;
  res.report["identity_max_error"] = b.identity_max_error;
  res.report["equivalence"] = {{"min_ratio", eq.min_ratio},     {"max_ratio", eq.max_ratio},
                               {"sharp_lower", eq.sharp_lower}, {"sharp_upper", eq.sharp_upper},
                               {"C1", eq.C1},                   {"C2", eq.C2}};
  const bool pass = b.all_pass() && b.identity_max_error <= 1e-10;
  res.report["pass"] = pass;
  res.exit_code = pass ? kExitPass : kExitCheckFail;
  return res;
}

DecaySummary decay_ensemble(const Setup& s, double h) {
  DecaySummary out;
  out.table = CsvTable{"a-priori decay per member; residual is the discrete Lyapunov quotient (nan on the last row)",
                       {"member", "t", "E", "Phi", "L", "bound", "margin", "residual"}, {}};
  out.worst_margin = std::numeric_limits<double>::infinity();
  out.worst_residual_excess = -std::numeric_limits<double>::infinity();
  out.worst_gronwall_excess = -std::numeric_limits<double>::infinity();
  const double tau = s.cfg.scheme.tau;
  const auto members = generate_ensemble(s.ensemble(s.cfg.params.energy), s.fn, tau);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const TrajectoryRecord rec = s.integ.evolve(members[i], tau, s.cfg.scheme.t_final(), h, s.cfg.scheme.stride);
    const DecayReport d = decay_estimate_check(rec, s.fn, s.consts, s.cfg.params.tol_rel,
                                               s.cfg.params.residual_slack_per_h * h);
    out.worst_margin = std::min(out.worst_margin, d.worst_margin);
    out.worst_residual_excess = std::max(out.worst_residual_excess, d.worst_residual_excess);
    out.worst_gronwall_excess = std::max(out.worst_gronwall_excess, d.gronwall_excess);
    out.bound_holds = out.bound_holds && d.bound_holds;
    out.residual_holds = out.residual_holds && d.residual_holds;
    out.blew_up = out.blew_up || d.blew_up;
    for (const auto& r : d.rows) out.table.add_row({double(i), r.t, r.E, r.Phi, r.L, r.bound, r.margin, r.residual});
    ++out.members;
  }
  return out;
}

namespace {

json decay_json(const DecaySummary& d, double h) {
  return {{"h", h},
          {"members", d.members},
          {"worst_margin", num(d.worst_margin)},
          {"worst_residual_excess", num(d.worst_residual_excess)},
          {"worst_gronwall_excess", num(d.worst_gronwall_excess)},
          {"bound_holds", d.bound_holds},
          {"residual_holds", d.residual_holds},
          {"blew_up", d.blew_up}};
}

json absorbing_json(const AbsorbingReport& a) {
  return {{"R", a.R},
          {"R_absorb", a.R_absorb},
          {"theta", a.theta},
          {"tau", a.tau},
          {"worst_norm_sq", num(a.worst_norm_sq)},
          {"absorbed", a.absorbed},
          {"status", a.absorbed ? "absorbed" : "not yet absorbed"},
          {"blew_up", a.blew_up}};
}

json pullback_json(const PullbackReport& p) {
  json rows = json::array();
  for (const auto& r : p.rows) {
    rows.push_back({{"tau", r.tau}, {"semidistance", num(r.semidistance)}, {"max_norm", num(r.max_norm)}});
  }
  return {{"rows", rows},
          {"monotone", p.monotone},
          {"total_decrease", num(p.total_decrease)},
          {"measured_rate", num(p.measured_rate)},
          {"predicted_rate", num(p.predicted_rate)},
          {"blew_up", p.blew_up}};
}

} // namespace

RunResult run_decay_check(const ExperimentConfig& cfg) {
  RunResult res;
  const Setup s(cfg);
  res.report = {{"experiment", "decay-check"}, {"config", scheme_json(cfg)}, {"constants", to_json(s.consts)}};
  if (require_assumptions(s, res.report) != kExitPass) {
    res.report["error"] = assumption_error(s);
    res.exit_code = kExitConfigError;
    return res;
  }
  const double h = cfg.scheme.h;
  const DecaySummary a = decay_ensemble(s, h);
  const DecaySummary b = decay_ensemble(s, h / 2.0);
  a.table.write(out_path(cfg, "decay.csv"));
  b.table.write(out_path(cfg, "decay_half_step.csv"));
  res.report["h"] = decay_json(a, h);
  res.report["h_half"] = decay_json(b, h / 2.0);
  const bool pass = a.bound_holds && a.residual_holds && b.bound_holds && b.residual_holds;
  res.report["pass"] = pass;
  res.report["verdict"] = pass ? "consistent with the a-priori decay estimate" : "decay estimate violated";
  res.exit_code = (a.blew_up || b.blew_up) ? kExitBlowUp : pass ? kExitPass : kExitCheckFail;
  return res;
}

AbsorbingSummary absorbing_summary(const Setup& s, double h) {
  AbsorbingSummary out;
  const double t1 = s.cfg.scheme.t_final();
  out.pass = true;
  for (double R : s.cfg.params.radii) {
    const AbsorbingReport a = absorbing_experiment(s.integ, s.fn, s.consts, t1, s.ensemble(R), h, -1.0,
                                                   s.cfg.params.tol_rel);
    out.pass = out.pass && a.absorbed;
    out.radii.push_back(a);
  }
  out.control = absorbing_experiment(s.integ, s.fn, s.consts, t1, s.ensemble(s.cfg.params.negative_radius), h, 0.0,
                                     s.cfg.params.tol_rel);
  // The control starts outside R_A by construction and must be reported so.
  out.pass = out.pass && !out.control.absorbed;
  out.table = CsvTable{"absorbing family; worst_norm_sq is the max squared product norm at t_final; control row last",
                       {"R", "theta", "tau", "worst_norm_sq", "R_absorb", "absorbed", "control"}, {}};
  for (const auto& a : out.radii) {
    out.table.add_row({a.R, a.theta, a.tau, a.worst_norm_sq, a.R_absorb, a.absorbed ? 1.0 : 0.0, 0.0});
  }
  const auto& c = out.control;
  out.table.add_row({c.R, c.theta, c.tau, c.worst_norm_sq, c.R_absorb, c.absorbed ? 1.0 : 0.0, 1.0});
  return out;
}

RunResult run_absorbing(const ExperimentConfig& cfg) {
  RunResult res;
  const Setup s(cfg);
  res.report = {{"experiment", "absorbing"}, {"config", scheme_json(cfg)}, {"constants", to_json(s.consts)}};
  if (require_assumptions(s, res.report) != kExitPass) {
    res.report["error"] = assumption_error(s);
    res.exit_code = kExitConfigError;
    return res;
  }
  const double h = cfg.scheme.h;
  const AbsorbingSummary a = absorbing_summary(s, h);
  const AbsorbingSummary b = absorbing_summary(s, h / 2.0);
  a.table.write(out_path(cfg, "absorbing.csv"));
  json radii = json::array();
  for (const auto& r : a.radii) radii.push_back(absorbing_json(r));
  res.report["radii"] = radii;
  res.report["negative_control"] = absorbing_json(a.control);
  res.report["pass_half_step"] = b.pass;
  const bool pass = a.pass && b.pass;
  bool blew = a.control.blew_up;
  for (const auto& r : a.radii) blew = blew || r.blew_up;
  res.report["pass"] = pass;
  res.exit_code = blew ? kExitBlowUp : pass ? kExitPass : kExitCheckFail;
  return res;
}

PullbackSummary pullback_summary(const Setup& s, double h) {
  PullbackSummary out;
  const double t1 = s.cfg.scheme.t_final();
  std::vector<double> taus;
  for (double off : s.cfg.params.pullback_offsets) taus.push_back(t1 - off);
  const EnsembleSpec ens = s.ensemble(s.cfg.params.energy);
  out.nonlinear = pullback_attraction_experiment(s.integ, s.fn, t1, taus, ens, h, s.cfg.scheme.s);

  // Contractive linear control: f = 0, constant coefficients.
  Models lin;
  lin.omega = OmegaModel::constant(s.cfg.params.linear_omega);
  lin.mu = MuModel::constant(s.cfg.params.linear_mu);
  lin.nonlin = s.cfg.models.nonlin;
  lin.nonlin.beta = 0.0;
  lin.nonlin.lambda_f = 0.0;
  const Integrator li(s.basis, lin, s.cfg.scheme.alpha);
  const EnergyFunctionals lf(s.basis, lin, s.cfg.scheme.alpha, s.consts.eps);
  out.linear = pullback_attraction_experiment(li, lf, t1, taus, ens, h, s.cfg.scheme.s);
  out.linear_rel_error = std::abs(out.linear.measured_rate - out.linear.predicted_rate) / out.linear.predicted_rate;

  // Tail of the ensemble evolved over T from tau.
  std::vector<State> evolved;
  for (const auto& w0 : generate_ensemble(ens, s.fn, s.cfg.scheme.tau)) {
    evolved.push_back(s.integ.evolve_to(w0, s.cfg.scheme.tau, t1, h));
  }
  std::vector<double> cutoffs = s.cfg.params.tail_cutoffs;
  if (cutoffs.empty()) {
    std::set<double> distinct(s.basis.eigenvalues().begin(), s.basis.eigenvalues().end());
    cutoffs.assign(distinct.begin(), distinct.end());
  }
  const double median = s.basis.nu_median();
  if (std::find(cutoffs.begin(), cutoffs.end(), median) == cutoffs.end()) cutoffs.push_back(median);
  std::sort(cutoffs.begin(), cutoffs.end());
  out.tail = tail_energy_compactness(evolved, s.basis, cutoffs);
  for (const auto& r : out.tail) {
    if (r.cutoff == median) out.tail_at_median = r.fraction;
  }
  out.pass = out.nonlinear.monotone && out.nonlinear.total_decrease >= 10.0 && !out.nonlinear.blew_up &&
             out.linear.monotone && out.linear_rel_error <= 0.05 && out.tail_at_median < 1e-3;
  return out;
}

RunResult run_pullback(const ExperimentConfig& cfg) {
  RunResult res;
  const Setup s(cfg);
  res.report = {{"experiment", "pullback"}, {"config", scheme_json(cfg)}};
  if (require_assumptions(s, res.report) != kExitPass) {
    res.report["error"] = assumption_error(s);
    res.exit_code = kExitConfigError;
    return res;
  }
  const double h = cfg.scheme.h;
  const PullbackSummary a = pullback_summary(s, h);
  const PullbackSummary b = pullback_summary(s, h / 2.0);

  CsvTable csv{"semidistance at t_final to the image from the last tau; X^{s/2} x X^{(s-1)/2} norm",
               {"tau", "semidistance", "max_norm", "linear_semidistance"}, {}};
  for (std::size_t i = 0; i < a.nonlinear.rows.size(); ++i) {
    csv.add_row({a.nonlinear.rows[i].tau, a.nonlinear.rows[i].semidistance, a.nonlinear.rows[i].max_norm,
                 a.linear.rows[i].semidistance});
  }
  csv.write(out_path(cfg, "pullback.csv"));
  CsvTable tail{"sup over the evolved ensemble of the l2 share of modes with nu > cutoff", {"cutoff", "fraction"}, {}};
  for (const auto& r : a.tail) tail.add_row({r.cutoff, r.fraction});
  tail.write(out_path(cfg, "tail.csv"));

  res.report["nonlinear"] = pullback_json(a.nonlinear);
  res.report["linear_control"] = pullback_json(a.linear);
  res.report["linear_control"]["relative_rate_error"] = num(a.linear_rel_error);
  res.report["tail_at_median"] = num(a.tail_at_median);
  res.report["median_cutoff"] = s.basis.nu_median();
  res.report["pass_half_step"] = b.pass;
  const bool pass = a.pass && b.pass;
  res.report["pass"] = pass;
  res.report["verdict"] = pass ? "consistent with pullback attraction" : "pullback attraction checks failed";
  res.exit_code = (a.nonlinear.blew_up || a.linear.blew_up) ? kExitBlowUp : pass ? kExitPass : kExitCheckFail;
  return res;
}

RunResult run_spectrum_table(const ExperimentConfig& cfg) {
  RunResult res;
  const SpectralBasis basis = cfg.basis();
  CsvTable csv{"eigenvalues lambda+- of -Lambda(t)^alpha per mode",
               {"alpha", "t", "mode", "nu", "re_plus", "im_plus", "re_minus", "im_minus"}, {}};
  const auto n = std::min<std::size_t>(basis.size(), static_cast<std::size_t>(cfg.params.spectrum_modes));
  for (double alpha : cfg.params.spectrum_alphas) {
    for (double t : cfg.params.spectrum_times) {
      for (std::size_t k = 0; k < n; ++k) {
        const auto [lp, lm] = spectrum(t, alpha, basis.eigenvalue(k), cfg.models.mu);
        csv.add_row({alpha, t, double(k), basis.eigenvalue(k), lp.real(), lp.imag(), lm.real(), lm.imag()});
      }
    }
  }
  csv.write(out_path(cfg, "spectrum.csv"));
  res.report = {{"experiment", "spectrum-table"}, {"config", scheme_json(cfg)}, {"rows", csv.rows.size()},
                {"pass", true}};
  return res;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"verify-operator", "check-assumptions", "simulate",
                                                 "energy-report",   "decay-check",       "absorbing",
                                                 "pullback",        "spectrum-table"};
  return names;
}

RunResult run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  RunResult res;
  if (name == "verify-operator") res = run_verify_operator(cfg);
  else if (name == "check-assumptions") res = run_check_assumptions(cfg);
  else if (name == "simulate") res = run_simulate(cfg);
  else if (name == "energy-report") res = run_energy_report(cfg);
  else if (name == "decay-check") res = run_decay_check(cfg);
  else if (name == "absorbing") res = run_absorbing(cfg);
  else if (name == "pullback") res = run_pullback(cfg);
  else if (name == "spectrum-table") res = run_spectrum_table(cfg);
  else throw std::invalid_argument("unknown experiment " + name);
  res.report["exit_code"] = res.exit_code;
  atomic_write(out_path(cfg, name + ".json"), res.report.dump(2) + "\n");
  return res;
}

} // namespace oscillon
