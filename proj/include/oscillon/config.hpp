#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscillon/basis.hpp"
#include "oscillon/coeffs.hpp"
#include "oscillon/dynamics.hpp"

namespace oscillon {

/// Raised for anything wrong in a config file; `key` is "section.name".
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

private:
  std::string key_;
};

struct SchemeConfig {
  double alpha = 0.9;
  double s = 0.9;
  double h = 0.01;
  double tau = -50.0;  // initial time
  double T = 50.0;     // run length; the final time is tau + T
  std::uint64_t seed = 1;
  int stride = 1;

  double t_final() const { return tau + T; }
};

struct ExperimentParams {
  int ensemble = 20;
  double energy = 10.0;
  double spectral_decay = 0.0;
  std::vector<double> radii{10.0, 100.0};
  double negative_radius = 1e4; // control: no pullback, radius past R_A
  std::vector<double> pullback_offsets{10.0, 20.0, 40.0, 80.0};
  double linear_omega = 0.1;
  double linear_mu = 1.0;
  int bound_samples = 1000;
  double bound_energy_lo = 1e-2;
  double bound_energy_hi = 1e3;
  double residual_slack_per_h = 10.0; // discrete Lyapunov slack, in units of h
  double tol_rel = 1e-6;
  double sample_span = 300.0;          // assumption grid [t_final - span, t_final]
  int sample_count = 3001;
  int identity_triples = 1000;
  double quad_tol = 1e-9;
  std::vector<double> limit_alphas{0.9, 0.99, 0.999};
  std::vector<double> spectrum_alphas{0.5, 0.9, 1.0};
  std::vector<double> spectrum_times{-10.0, 0.0, 10.0};
  int spectrum_modes = 10;
  std::vector<double> tail_cutoffs; // empty: every distinct eigenvalue
};

struct OutputConfig {
  std::string dir = "out";
  std::string dump; // optional binary state dump for simulate
};

struct ExperimentConfig {
  int dim = 3;
  int modes = 4;
  Models models;
  bool mu_steepness_auto = true; // resolved to the largest admissible delta_mu
  SchemeConfig scheme;
  ExperimentParams params;
  OutputConfig output;

  SpectralBasis basis() const { return SpectralBasis(dim, modes); }
  std::vector<double> sample_grid() const;
};

/// Defaults with the logistic mu steepness still unresolved.
ExperimentConfig default_config();

/// Sectioned key-value text. Unknown sections or keys, malformed numbers and
/// out-of-range values raise ConfigError naming the key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Checks cross-field invariants (admissible (rho, s, alpha), h > 0, ...) and
/// fills in an automatic mu steepness. Throws ConfigError.
void finalize_config(ExperimentConfig& cfg);

/// The documented grammar, printed by the CLI.
std::string config_grammar();

} // namespace oscillon
