#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "oscillon/config.hpp"
#include "oscillon/diagnostics.hpp"
#include "oscillon/io.hpp"

namespace oscillon {

enum ExitCode : int { kExitPass = 0, kExitCheckFail = 1, kExitConfigError = 2, kExitBlowUp = 3 };

struct RunResult {
  nlohmann::json report;
  int exit_code = kExitPass;
};

// Operator identities on random admissible (alpha, t, nu) triples.
struct IdentitySuite {
  long triples = 0;
  double inverse_error = 0.0;  // max entry of Lambda^a Lambda^{-a} - I
  double det_error = 0.0;      // relative, against mu^a nu^a
  double trace_error = 0.0;    // relative, against 2 mu^{a/2} cos(pi a/2) nu^{a/2}
  double spectrum_error = 0.0; // relative, closed form vs 2x2 eigensolve
  bool pass = false;
};

IdentitySuite operator_identity_suite(const MuModel& mu, int count, std::uint64_t seed);

struct QuadratureRow {
  double alpha = 0.0;
  double t = 0.0;
  double nu = 0.0;
  double error = 0.0;          // max entry error relative to the largest closed-form entry
  double error_estimate = 0.0;
  int intervals = 0;
};

struct QuadratureSuite {
  std::vector<QuadratureRow> rows;
  double worst = 0.0;
  bool pass = false;
};

/// alpha in {0.1, ..., 0.9} times `per_alpha` random (t, nu).
QuadratureSuite balakrishnan_suite(const MuModel& mu, int per_alpha, std::uint64_t seed, double quad_tol);

struct AlphaLimitSuite {
  std::vector<AlphaLimitRow> rows;
  double inverse_ratio = 0.0; // last / first
  double action_ratio = 0.0;
  bool strictly_decreasing = false;
};

/// The smooth state u_k = nu_k^{-2}, v_k = nu_k^{-2}/2 at time t.
AlphaLimitSuite alpha_limit_suite(const MuModel& mu, const SpectralBasis& basis, double t,
                                  const std::vector<double>& alphas);

struct RichardsonResult {
  double e_coarse = 0.0; // ||w_h - w_{h/2}||
  double e_fine = 0.0;   // ||w_{h/2} - w_{h/4}||
  double order = 0.0;
};

RichardsonResult richardson_order(const Integrator& integ, const State& w0, double tau, double t_end, double h);

/// Everything an experiment needs, built once from a finalized config.
struct Setup {
  ExperimentConfig cfg;
  SpectralBasis basis;
  StructuralConstants consts;
  AssumptionReport assumptions;
  Integrator integ;
  EnergyFunctionals fn;

  explicit Setup(const ExperimentConfig& finalized);
  EnsembleSpec ensemble(double energy) const;
};

nlohmann::json to_json(const StructuralConstants& k);
nlohmann::json to_json(const AssumptionReport& r);

RunResult run_verify_operator(const ExperimentConfig& cfg);
RunResult run_check_assumptions(const ExperimentConfig& cfg);
RunResult run_simulate(const ExperimentConfig& cfg);
RunResult run_energy_report(const ExperimentConfig& cfg);
RunResult run_decay_check(const ExperimentConfig& cfg);
RunResult run_absorbing(const ExperimentConfig& cfg);
RunResult run_pullback(const ExperimentConfig& cfg);
RunResult run_spectrum_table(const ExperimentConfig& cfg);

/// Dispatch by subcommand name; writes <output.dir>/<name>.json.
RunResult run_experiment(const std::string& name, const ExperimentConfig& cfg);
const std::vector<std::string>& experiment_names();

// Pieces shared with the acceptance driver.

struct DecaySummary {
  int members = 0;
  double worst_margin = 0.0;
  double worst_residual_excess = 0.0;
  double worst_gronwall_excess = 0.0;
  bool bound_holds = true;
  bool residual_holds = true;
  bool blew_up = false;
  CsvTable table;
};

DecaySummary decay_ensemble(const Setup& setup, double h);

struct AbsorbingSummary {
  std::vector<AbsorbingReport> radii;
  AbsorbingReport control;
  bool pass = false; // every radius absorbed and the control reported outside
  CsvTable table;
};

AbsorbingSummary absorbing_summary(const Setup& setup, double h);

struct PullbackSummary {
  PullbackReport nonlinear;
  PullbackReport linear;
  double linear_rel_error = 0.0;
  std::vector<TailRow> tail;
  double tail_at_median = 0.0;
  bool pass = false;
};

PullbackSummary pullback_summary(const Setup& setup, double h);

} // namespace oscillon
