// Acceptance driver: one line per criterion on the default configuration.
//
//   acceptance [--config file] [--expect-fail n]...
//
// Exit status is 0 when every criterion passes, or when exactly the criteria
// named by --expect-fail fail and all others pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oscillon/config.hpp"
#include "oscillon/experiments.hpp"

using namespace oscillon;

namespace {

struct Outcome {
  int id;
  bool pass;
  std::string summary;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double weighted_energy(const SpectralBasis& b, double mu, const State& w) {
  double e = 0.0;
  for (Eigen::Index k = 0; k < w.u.size(); ++k) e += mu * b.eigenvalues()[k] * w.u[k] * w.u[k] + w.v[k] * w.v[k];
  return e;
}

Outcome identities(const Setup& s) {
  const IdentitySuite r = operator_identity_suite(s.cfg.models.mu, s.cfg.params.identity_triples, s.cfg.scheme.seed);
  const bool ok = r.pass && r.triples >= 1000;
  return {1, ok,
          "operator identities over " + std::to_string(r.triples) + " triples: inverse " + fmt(r.inverse_error) +
              ", det " + fmt(r.det_error) + ", trace " + fmt(r.trace_error) + ", spectrum " +
              fmt(r.spectrum_error)};
}

Outcome quadrature(const Setup& s) {
  const QuadratureSuite r = balakrishnan_suite(s.cfg.models.mu, 10, s.cfg.scheme.seed, s.cfg.params.quad_tol);
  const bool ok = r.pass && r.rows.size() == 90 && r.worst <= 1e-6;
  return {2, ok, "quadrature vs closed form, " + std::to_string(r.rows.size()) + " cases, worst " + fmt(r.worst)};
}

Outcome alpha_limit(const Setup& s) {
  const AlphaLimitSuite r = alpha_limit_suite(s.cfg.models.mu, s.basis, s.cfg.scheme.t_final(), {0.9, 0.99, 0.999});
  const bool ok = r.strictly_decreasing && r.inverse_ratio < 1e-2 && r.action_ratio < 1e-2;
  return {3, ok,
          std::string("alpha -> 1 columns ") + (r.strictly_decreasing ? "strictly decreasing" : "not decreasing") +
              ", last/first inverse " + fmt(r.inverse_ratio) + ", action " + fmt(r.action_ratio) +
              " (limit 0.01)"};
}

Outcome unitary(const Setup& s) {
  Models m;
  m.omega = OmegaModel::constant(0.0);
  m.mu = MuModel::constant(s.cfg.models.mu.max);
  m.nonlin = NonlinearitySpec{0.0, 0.0, s.cfg.models.nonlin.rho};
  const Integrator integ(s.basis, m, 1.0);
  const EnergyFunctionals fn(s.basis, m, 1.0, s.consts.eps);
  EnsembleSpec ens;
  ens.count = 1;
  ens.seed = s.cfg.scheme.seed;
  const State w0 = generate_ensemble(ens, fn, 0.0)[0];
  const double h = s.cfg.scheme.h;
  const State w1 = integ.evolve_to(w0, 0.0, 1e4 * h, h);
  const double e0 = weighted_energy(s.basis, m.mu.max, w0);
  const double drift = std::abs(weighted_energy(s.basis, m.mu.max, w1) / e0 - 1.0);
  return {4, drift <= 1e-10, "unitary limit over 10^4 steps, relative energy drift " + fmt(drift)};
}

Outcome lyapunov_identity(const Setup& s) {
  const double t = s.cfg.scheme.t_final();
  const auto samples = bound_samples(s.fn, t, 1000, s.cfg.params.bound_energy_lo, s.cfg.params.bound_energy_hi,
                                     s.cfg.scheme.seed + 1);
  double worst = 0.0;
  for (const State& w : samples) {
    const double P = s.fn.phi(t, w.u, s.fn.velocity(t, w));
    worst = std::max(worst, std::abs(s.fn.lyapunov(t, w) - P) / std::max(1.0, std::abs(P)));
  }
  return {5, worst <= 1e-10, "L = Phi(u, u_t) on " + std::to_string(samples.size()) + " states, worst " + fmt(worst)};
}

Outcome bounds(const Setup& s) {
  const double t = s.cfg.scheme.t_final();
  const auto samples = bound_samples(s.fn, t, s.cfg.params.bound_samples, s.cfg.params.bound_energy_lo,
                                     s.cfg.params.bound_energy_hi, s.cfg.scheme.seed);
  const TwoSidedBoundsReport r = two_sided_bounds(s.fn, s.consts, t, samples);
  std::ostringstream os;
  os << "two-sided bounds on " << samples.size() << " states:";
  long violations = 0;
  for (const auto& c : r.checks) {
    os << " " << c.name << " " << c.violations << " (margin " << fmt(c.worst_margin) << ")";
    violations += c.violations;
  }
  return {6, violations == 0 && samples.size() >= 1000, os.str()};
}

Outcome decay(const Setup& s, double h) {
  const DecaySummary r = decay_ensemble(s, h);
  const bool ok = r.bound_holds && r.residual_holds && !r.blew_up && r.members == 20;
  return {7, ok,
          "decay estimate, " + std::to_string(r.members) + " members at h = " + fmt(h) + ": worst margin " +
              fmt(r.worst_margin) + ", worst residual excess " + fmt(r.worst_residual_excess)};
}

Outcome absorbing(const Setup& s, double h) {
  const AbsorbingSummary r = absorbing_summary(s, h);
  std::ostringstream os;
  os << "absorbing at h = " << fmt(h) << ":";
  for (const auto& a : r.radii) os << " R " << fmt(a.R) << " -> " << fmt(a.worst_norm_sq) << " <= " << fmt(a.R_absorb);
  os << "; control R " << fmt(r.control.R) << " " << (r.control.absorbed ? "inside" : "not yet absorbed");
  return {8, r.pass, os.str()};
}

Outcome pullback(const Setup& s, double h) {
  const PullbackSummary r = pullback_summary(s, h);
  const bool ok = r.pass && r.nonlinear.monotone && r.nonlinear.total_decrease >= 10.0 && r.linear_rel_error <= 0.05;
  return {9, ok,
          "pullback at h = " + fmt(h) + ": " + (r.nonlinear.monotone ? "monotone" : "not monotone") +
              ", decrease x" + fmt(r.nonlinear.total_decrease) + ", linear rate error " + fmt(r.linear_rel_error)};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string config_path;
  std::vector<int> expect_fail;
  app.add_option("-c,--config", config_path, "config file");
  app.add_option("--expect-fail", expect_fail, "criteria expected to fail");
  CLI11_PARSE(app, argc, argv);

  ExperimentConfig cfg;
  try {
    cfg = config_path.empty() ? default_config() : load_config(config_path);
    finalize_config(cfg);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfigError;
  }
  const Setup setup(cfg);
  if (!setup.assumptions.all_pass()) {
    std::cerr << "assumption checks failed on the configuration\n";
    return kExitConfigError;
  }
  const double h = cfg.scheme.h;
  const auto start = std::chrono::steady_clock::now();

  std::vector<Outcome> out;
  const auto report = [&](const Outcome& o) {
    std::cout << "criterion " << o.id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.summary << std::endl;
    out.push_back(o);
  };

  report(identities(setup));
  report(quadrature(setup));
  report(alpha_limit(setup));
  report(unitary(setup));
  report(lyapunov_identity(setup));
  report(bounds(setup));

  // 7-9 at h and h/2; the criterion passes when both do
  std::vector<bool> at_h, at_half;
  for (auto run : {decay, absorbing, pullback}) {
    const Outcome a = run(setup, h);
    const Outcome b = run(setup, h / 2.0);
    at_h.push_back(a.pass);
    at_half.push_back(b.pass);
    report({a.id, a.pass && b.pass, a.summary + " | " + b.summary});
  }

  EnsembleSpec ens = setup.ensemble(cfg.params.energy);
  ens.count = 1;
  const State w0 = generate_ensemble(ens, setup.fn, cfg.scheme.tau)[0];
  const RichardsonResult rich = richardson_order(setup.integ, w0, cfg.scheme.tau, cfg.scheme.tau + 1.0, h);
  const bool same = at_h == at_half;
  report({10, rich.order >= 1.9 && same,
          "self-convergence order " + fmt(rich.order) + " (errors " + fmt(rich.e_coarse) + ", " + fmt(rich.e_fine) +
              "); bound checks at h and h/2 " + (same ? "identical" : "differ")});

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  int unexpected = 0;
  for (const auto& o : out) {
    const bool want_fail = expected.count(o.id) > 0;
    if (o.pass == want_fail) {
      ++unexpected;
      std::cout << "unexpected " << (o.pass ? "pass" : "failure") << " of criterion " << o.id << std::endl;
    }
  }
  std::cout << "acceptance: " << std::count_if(out.begin(), out.end(), [](const Outcome& o) { return o.pass; })
            << "/" << out.size() << " criteria pass in " << fmt(secs) << " s" << std::endl;
  return unexpected == 0 ? kExitPass : kExitCheckFail;
}
