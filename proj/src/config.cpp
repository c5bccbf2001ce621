#include "oscillon/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "oscillon/nonlin.hpp"

namespace oscillon {

namespace pt = boost::property_tree;

std::vector<double> ExperimentConfig::sample_grid() const {
  const double t1 = scheme.t_final();
  return uniform_grid(t1 - params.sample_span, t1, params.sample_count);
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.models.omega = OmegaModel::logistic_decay(0.5, 2.0, 0.1);
  cfg.models.mu = MuModel::logistic_rise(1.0, 2.0, 0.0);
  cfg.mu_steepness_auto = true;
  cfg.models.nonlin = NonlinearitySpec{};
  return cfg;
}

namespace {

// Typed access to one section; remembers which keys were consumed so the
// leftovers can be reported.
class Section {
public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  std::string key(const std::string& k) const { return name_ + "." + k; }
  bool has(const std::string& k) {
    used_.insert(k);
    return tree_ && tree_->find(k) != tree_->not_found();
  }
  std::string raw(const std::string& k) {
    used_.insert(k);
    return tree_->get<std::string>(k);
  }

  double number(const std::string& k, double fallback) {
    if (!has(k)) return fallback;
    return parse_number(k, raw(k));
  }
  int integer(const std::string& k, int fallback) {
    if (!has(k)) return fallback;
    const double x = parse_number(k, raw(k));
    if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError(key(k), "expected an integer, got '" + raw(k) + "'");
    return static_cast<int>(x);
  }
  std::uint64_t unsigned_integer(const std::string& k, std::uint64_t fallback) {
    if (!has(k)) return fallback;
    const std::string text = trim(raw(k));
    std::size_t pos = 0;
    std::uint64_t value = 0;
    try {
      if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
      value = std::stoull(text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != text.size()) throw ConfigError(key(k), "expected a nonnegative integer, got '" + text + "'");
    return value;
  }
  std::string word(const std::string& k, const std::string& fallback) {
    if (!has(k)) return fallback;
    return trim(raw(k));
  }
  std::vector<double> list(const std::string& k, const std::vector<double>& fallback) {
    if (!has(k)) return fallback;
    std::vector<double> out;
    std::stringstream ss(raw(k));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (trim(item).empty()) continue;
      out.push_back(parse_number(k, item));
    }
    return out;
  }

  void reject_unknown() const {
    if (!tree_) return;
    for (const auto& [k, v] : *tree_) {
      if (!used_.count(k)) throw ConfigError(key(k), "unknown key");
    }
  }

private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  double parse_number(const std::string& k, const std::string& text) const {
    const std::string t = trim(text);
    std::size_t pos = 0;
    double x = 0.0;
    try {
      x = std::stod(t, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != t.size() || !std::isfinite(x)) {
      throw ConfigError(key(k), "expected a finite number, got '" + t + "'");
    }
    return x;
  }

  std::string name_;
  const pt::ptree* tree_;
  std::set<std::string> used_;
};

const std::set<std::string> kSections = {"basis", "omega", "mu", "nonlinearity", "scheme", "experiment", "output"};

CoefficientTable read_table(Section& sec) {
  CoefficientTable table;
  table.times = sec.list("times", {});
  table.values = sec.list("values", {});
  if (table.times.size() < 2) throw ConfigError(sec.key("times"), "a table needs at least two times");
  if (table.values.size() != table.times.size()) {
    throw ConfigError(sec.key("values"), "needs as many entries as times");
  }
  for (std::size_t i = 1; i < table.times.size(); ++i) {
    if (!(table.times[i] > table.times[i - 1])) throw ConfigError(sec.key("times"), "must be strictly increasing");
  }
  return table;
}

double table_lipschitz(const CoefficientTable& table) {
  double lip = 0.0;
  for (std::size_t i = 1; i < table.times.size(); ++i) {
    lip = std::max(lip, std::abs(table.values[i] - table.values[i - 1]) / (table.times[i] - table.times[i - 1]));
  }
  return lip;
}

void read_holder(Section& sec, HolderData& holder) {
  holder.exponent = sec.number("holder_exponent", holder.exponent);
  holder.constant = sec.number("holder_constant", holder.constant);
  if (!(holder.exponent > 0.0 && holder.exponent <= 1.0)) {
    throw ConfigError(sec.key("holder_exponent"), "must lie in (0, 1]");
  }
  if (holder.constant < 0.0) throw ConfigError(sec.key("holder_constant"), "must be nonnegative");
}

OmegaModel read_omega(Section& sec, const OmegaModel& fallback) {
  const std::string family = sec.word("family", "logistic");
  OmegaModel m;
  if (family == "constant") {
    m = OmegaModel::constant(sec.number("value", fallback.max));
  } else if (family == "logistic") {
    m = OmegaModel::logistic_decay(sec.number("min", fallback.min), sec.number("max", fallback.max),
                                   sec.number("steepness", fallback.steepness));
    if (!(m.min <= m.max)) throw ConfigError(sec.key("min"), "must not exceed omega.max");
    if (m.steepness < 0.0) throw ConfigError(sec.key("steepness"), "must be nonnegative");
  } else if (family == "table") {
    m.kind = OmegaModel::Kind::Table;
    m.table = read_table(sec);
    m.holder = {1.0, table_lipschitz(m.table)};
  } else {
    throw ConfigError(sec.key("family"), "expected constant, logistic or table, got '" + family + "'");
  }
  read_holder(sec, m.holder);
  return m;
}

MuModel read_mu(Section& sec, const MuModel& fallback, bool& steepness_auto) {
  const std::string family = sec.word("family", "logistic");
  MuModel m;
  steepness_auto = false;
  if (family == "constant") {
    m = MuModel::constant(sec.number("value", fallback.min));
  } else if (family == "logistic") {
    const double lo = sec.number("min", fallback.min);
    const double hi = sec.number("max", fallback.max);
    double steep = 0.0;
    if (!sec.has("steepness") || sec.word("steepness", "auto") == "auto") {
      steepness_auto = true;
    } else {
      steep = sec.number("steepness", 0.0);
      if (!(steep > 0.0)) throw ConfigError(sec.key("steepness"), "must be positive or 'auto'");
    }
    if (!(lo > 0.0)) throw ConfigError(sec.key("min"), "must be positive");
    if (!(lo < hi)) throw ConfigError(sec.key("max"), "must exceed mu.min for a rising logistic");
    m = MuModel::logistic_rise(lo, hi, steep);
  } else if (family == "table") {
    m.kind = MuModel::Kind::Table;
    m.table = read_table(sec);
    m.min = *std::min_element(m.table.values.begin(), m.table.values.end());
    m.max = *std::max_element(m.table.values.begin(), m.table.values.end());
    if (!(m.min > 0.0)) throw ConfigError(sec.key("values"), "mu must stay positive");
    m.holder = {1.0, table_lipschitz(m.table)};
  } else {
    throw ConfigError(sec.key("family"), "expected constant, logistic or table, got '" + family + "'");
  }
  if (family == "constant" && !(m.min > 0.0)) throw ConfigError(sec.key("value"), "must be positive");
  read_holder(sec, m.holder);
  return m;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", "line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [name, sub] : tree) {
    if (sub.empty() && !sub.data().empty()) throw ConfigError(name, "key outside any section");
    if (!kSections.count(name)) throw ConfigError(name, "unknown section");
  }
  const auto section = [&](const std::string& name) {
    const auto it = tree.find(name);
    return Section(name, it == tree.not_found() ? nullptr : &it->second);
  };

  ExperimentConfig cfg = default_config();

  Section basis = section("basis");
  cfg.dim = basis.integer("dim", cfg.dim);
  cfg.modes = basis.integer("modes", cfg.modes);
  if (cfg.dim < 1 || cfg.dim > 6) throw ConfigError("basis.dim", "must lie in 1..6");
  if (cfg.modes < 1 || std::pow(cfg.modes, cfg.dim) > 1e5) throw ConfigError("basis.modes", "must be >= 1 with modes^dim <= 1e5");
  basis.reject_unknown();

  Section omega = section("omega");
  cfg.models.omega = read_omega(omega, cfg.models.omega);
  omega.reject_unknown();

  Section mu = section("mu");
  cfg.models.mu = read_mu(mu, cfg.models.mu, cfg.mu_steepness_auto);
  mu.reject_unknown();

  Section nl = section("nonlinearity");
  auto& f = cfg.models.nonlin;
  f.beta = nl.number("beta", f.beta);
  f.lambda_f = nl.number("lambda", f.lambda_f);
  f.rho = nl.number("rho", f.rho);
  if (!(f.rho > 1.0)) throw ConfigError("nonlinearity.rho", "must exceed 1");
  if (f.lambda_f < 0.0) throw ConfigError("nonlinearity.lambda", "must be nonnegative");
  if (nl.has("refinement") && nl.word("refinement", "") == "dealiased") {
    f.refinement = dealiased_refinement(f.rho);
  } else {
    f.refinement = nl.integer("refinement", 1);
    if (f.refinement < 1) throw ConfigError("nonlinearity.refinement", "must be >= 1 or 'dealiased'");
  }
  nl.reject_unknown();

  Section sc = section("scheme");
  auto& s = cfg.scheme;
  s.alpha = sc.number("alpha", s.alpha);
  s.s = sc.number("s", s.s);
  s.h = sc.number("h", s.h);
  s.tau = sc.number("tau", s.tau);
  s.T = sc.number("T", s.T);
  s.seed = sc.unsigned_integer("seed", s.seed);
  s.stride = sc.integer("stride", s.stride);
  if (!(s.alpha > 0.0 && s.alpha <= 1.0)) throw ConfigError("scheme.alpha", "must lie in (0, 1]");
  if (!(s.h > 0.0)) throw ConfigError("scheme.h", "must be positive");
  if (s.T < 0.0) throw ConfigError("scheme.T", "must be nonnegative");
  if (s.stride < 1) throw ConfigError("scheme.stride", "must be >= 1");
  sc.reject_unknown();

  Section ex = section("experiment");
  auto& p = cfg.params;
  p.ensemble = ex.integer("ensemble", p.ensemble);
  p.energy = ex.number("energy", p.energy);
  p.spectral_decay = ex.number("spectral_decay", p.spectral_decay);
  p.radii = ex.list("radii", p.radii);
  p.negative_radius = ex.number("negative_radius", p.negative_radius);
  p.pullback_offsets = ex.list("pullback_offsets", p.pullback_offsets);
  p.linear_omega = ex.number("linear_omega", p.linear_omega);
  p.linear_mu = ex.number("linear_mu", p.linear_mu);
  p.bound_samples = ex.integer("bound_samples", p.bound_samples);
  p.bound_energy_lo = ex.number("bound_energy_lo", p.bound_energy_lo);
  p.bound_energy_hi = ex.number("bound_energy_hi", p.bound_energy_hi);
  p.residual_slack_per_h = ex.number("residual_slack_per_h", p.residual_slack_per_h);
  p.tol_rel = ex.number("tol_rel", p.tol_rel);
  p.sample_span = ex.number("sample_span", p.sample_span);
  p.sample_count = ex.integer("sample_count", p.sample_count);
  p.identity_triples = ex.integer("identity_triples", p.identity_triples);
  p.quad_tol = ex.number("quad_tol", p.quad_tol);
  p.limit_alphas = ex.list("limit_alphas", p.limit_alphas);
  p.spectrum_alphas = ex.list("spectrum_alphas", p.spectrum_alphas);
  p.spectrum_times = ex.list("spectrum_times", p.spectrum_times);
  p.spectrum_modes = ex.integer("spectrum_modes", p.spectrum_modes);
  p.tail_cutoffs = ex.list("tail_cutoffs", p.tail_cutoffs);
  if (p.ensemble < 1) throw ConfigError("experiment.ensemble", "must be >= 1");
  if (!(p.energy >= 0.0)) throw ConfigError("experiment.energy", "must be nonnegative");
  for (double r : p.radii) {
    if (!(r >= 0.0)) throw ConfigError("experiment.radii", "radii must be nonnegative");
  }
  if (p.pullback_offsets.size() < 3) throw ConfigError("experiment.pullback_offsets", "needs at least 3 entries");
  for (std::size_t i = 0; i < p.pullback_offsets.size(); ++i) {
    if (!(p.pullback_offsets[i] > 0.0) || (i && !(p.pullback_offsets[i] > p.pullback_offsets[i - 1]))) {
      throw ConfigError("experiment.pullback_offsets", "must be positive and strictly increasing");
    }
  }
  if (p.bound_samples < 1) throw ConfigError("experiment.bound_samples", "must be >= 1");
  if (!(p.bound_energy_lo > 0.0 && p.bound_energy_hi >= p.bound_energy_lo)) {
    throw ConfigError("experiment.bound_energy_lo", "need 0 < bound_energy_lo <= bound_energy_hi");
  }
  if (!(p.sample_span > 0.0)) throw ConfigError("experiment.sample_span", "must be positive");
  if (p.sample_count < 2) throw ConfigError("experiment.sample_count", "must be >= 2");
  if (!(p.tol_rel >= 0.0)) throw ConfigError("experiment.tol_rel", "must be nonnegative");
  if (!(p.quad_tol > 0.0)) throw ConfigError("experiment.quad_tol", "must be positive");
  if (p.limit_alphas.empty()) throw ConfigError("experiment.limit_alphas", "must not be empty");
  for (double a : p.limit_alphas) {
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("experiment.limit_alphas", "entries must lie in (0, 1]");
  }
  for (double a : p.spectrum_alphas) {
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("experiment.spectrum_alphas", "entries must lie in (0, 1]");
  }
  if (p.spectrum_modes < 1) throw ConfigError("experiment.spectrum_modes", "must be >= 1");
  ex.reject_unknown();

  Section out = section("output");
  cfg.output.dir = out.word("dir", cfg.output.dir);
  cfg.output.dump = out.word("dump", cfg.output.dump);
  out.reject_unknown();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void finalize_config(ExperimentConfig& cfg) {
  try {
    check_admissible(cfg.dim, cfg.models.nonlin.rho, cfg.scheme.s, cfg.scheme.alpha);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scheme.alpha", e.what());
  }
  try {
    step_count(cfg.scheme.tau, cfg.scheme.t_final(), cfg.scheme.h);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scheme.h", e.what());
  }
  if (cfg.mu_steepness_auto) {
    const double steep =
        max_admissible_mu_steepness(cfg.models.omega, cfg.models.mu, cfg.scheme.alpha, cfg.basis(), cfg.sample_grid());
    if (!(steep > 0.0)) throw ConfigError("mu.steepness", "no admissible steepness for these coefficients");
    const HolderData holder = cfg.models.mu.holder;
    cfg.models.mu = MuModel::logistic_rise(cfg.models.mu.min, cfg.models.mu.max, steep);
    cfg.models.mu.holder.exponent = holder.exponent;
    cfg.mu_steepness_auto = false;
  }
}

std::string config_grammar() {
  return R"(Config files are INI-style text: "[section]" headers, "key = value" lines,
full-line ';' or '#' comments. Lists are comma separated. Every key is optional.

[basis]        dim (3), modes (4)
[omega]        family = constant | logistic | table
               constant: value; logistic: min (0.5), max (2), steepness (0.1);
               table: times, values (piecewise linear, clamped)
               holder_exponent, holder_constant (declared Hoelder data)
[mu]           family = constant | logistic | table
               constant: value; logistic: min (1), max (2), steepness (auto);
               table: times, values; holder_exponent, holder_constant
[nonlinearity] beta (1), lambda (1), rho (4), refinement (1 | n | dealiased)
[scheme]       alpha (0.9), s (0.9), h (0.01), tau (-50), T (50), seed (1), stride (1)
[experiment]   ensemble (20), energy (10), spectral_decay (0), radii (10, 100),
               negative_radius (1e4), pullback_offsets (10, 20, 40, 80),
               linear_omega (0.1), linear_mu (1), bound_samples (1000),
               bound_energy_lo (1e-2), bound_energy_hi (1e3),
               residual_slack_per_h (10), tol_rel (1e-6), sample_span (300),
               sample_count (3001), identity_triples (1000), quad_tol (1e-9),
               limit_alphas (0.9, 0.99, 0.999), spectrum_alphas (0.5, 0.9, 1),
               spectrum_times (-10, 0, 10), spectrum_modes (10), tail_cutoffs
[output]       dir (out), dump (binary state dump path, simulate only)
)";
}

} // namespace oscillon
