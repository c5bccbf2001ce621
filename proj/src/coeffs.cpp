#include "oscillon/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oscillon {

namespace {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::size_t table_segment(const CoefficientTable& table, double t) {
  const auto it = std::upper_bound(table.times.begin(), table.times.end(), t);
  const auto idx = static_cast<std::size_t>(std::distance(table.times.begin(), it));
  return std::clamp<std::size_t>(idx, 1, table.times.size() - 1) - 1;
}

} // namespace

double CoefficientTable::value(double t) const {
  if (times.empty()) throw std::invalid_argument("coefficient table is empty");
  if (times.size() == 1 || t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const std::size_t i = table_segment(*this, t);
  const double w = (t - times[i]) / (times[i + 1] - times[i]);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

double CoefficientTable::slope(double t) const {
  if (times.size() < 2 || t < times.front() || t > times.back()) return 0.0;
  const std::size_t i = table_segment(*this, t);
  return (values[i + 1] - values[i]) / (times[i + 1] - times[i]);
}

OmegaModel OmegaModel::constant(double value) {
  OmegaModel m;
  m.kind = Kind::Constant;
  m.min = m.max = value;
  m.steepness = 0.0;
  m.holder = {1.0, 0.0};
  return m;
}

OmegaModel OmegaModel::logistic_decay(double omega_min, double omega_max, double steepness) {
  OmegaModel m;
  m.kind = Kind::LogisticDecay;
  m.min = omega_min;
  m.max = omega_max;
  m.steepness = steepness;
  m.holder = {1.0, (omega_max - omega_min) * std::abs(steepness) / 4.0};
  return m;
}

MuModel MuModel::constant(double value) {
  MuModel m;
  m.kind = Kind::Constant;
  m.min = m.max = value;
  m.steepness = 0.0;
  m.holder = {1.0, 0.0};
  return m;
}

MuModel MuModel::logistic_rise(double mu_min, double mu_max, double steepness) {
  MuModel m;
  m.kind = Kind::LogisticRise;
  m.min = mu_min;
  m.max = mu_max;
  m.steepness = steepness;
  m.holder = {1.0, (mu_max - mu_min) * steepness / 4.0};
  return m;
}

double eval_omega(const OmegaModel& model, double t) {
  switch (model.kind) {
  case OmegaModel::Kind::Constant: return model.max;
  case OmegaModel::Kind::LogisticDecay:
    return model.min + (model.max - model.min) * logistic(-model.steepness * t);
  case OmegaModel::Kind::Table: return model.table.value(t);
  }
  return model.max;
}

double eval_omega_prime(const OmegaModel& model, double t) {
  switch (model.kind) {
  case OmegaModel::Kind::Constant: return 0.0;
  case OmegaModel::Kind::LogisticDecay: {
    const double s = logistic(-model.steepness * t);
    return -(model.max - model.min) * model.steepness * s * (1.0 - s);
  }
  case OmegaModel::Kind::Table: return model.table.slope(t);
  }
  return 0.0;
}

double omega_sup(const OmegaModel& model) {
  switch (model.kind) {
  case OmegaModel::Kind::Constant: return model.max;
  case OmegaModel::Kind::LogisticDecay: return std::max(model.min, model.max);
  case OmegaModel::Kind::Table:
    return *std::max_element(model.table.values.begin(), model.table.values.end());
  }
  return model.max;
}

double eval_mu(const MuModel& model, double t) {
  switch (model.kind) {
  case MuModel::Kind::Constant: return model.max;
  case MuModel::Kind::LogisticRise:
    return model.min + (model.max - model.min) * logistic(model.steepness * t);
  case MuModel::Kind::Table: return model.table.value(t);
  }
  return model.max;
}

double eval_mu_prime(const MuModel& model, double t) {
  switch (model.kind) {
  case MuModel::Kind::Constant: return 0.0;
  case MuModel::Kind::LogisticRise: {
    const double s = logistic(model.steepness * t);
    return (model.max - model.min) * model.steepness * s * (1.0 - s);
  }
  case MuModel::Kind::Table: return model.table.slope(t);
  }
  return 0.0;
}

double mu_envelope(const MuModel& model, double t) { return eval_mu_prime(model, t) / eval_mu(model, t); }

double mu_lower(const MuModel& model) {
  if (model.kind == MuModel::Kind::Table) {
    return *std::min_element(model.table.values.begin(), model.table.values.end());
  }
  return std::min(model.min, model.max);
}

double mu_upper(const MuModel& model) {
  if (model.kind == MuModel::Kind::Table) {
    return *std::max_element(model.table.values.begin(), model.table.values.end());
  }
  return std::max(model.min, model.max);
}

StructuralConstants compute_constants(const OmegaModel& omega, const MuModel& mu, double alpha,
                                      const SpectralBasis& basis, double C_eps, double t0) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (C_eps < 0.0) throw std::invalid_argument("C_eps must be nonnegative");
  if (!std::isfinite(t0)) throw std::invalid_argument("t0 must be finite");

  StructuralConstants k;
  k.alpha = alpha;
  k.t0 = t0;
  k.W = omega_sup(omega);
  k.omega_t0 = eval_omega(omega, t0);
  k.mu_min = mu_lower(mu);
  k.mu_max = mu_upper(mu);

  const double lo = (1.0 - alpha) / 4.0;
  const double mid = 0.25;
  const double hi = (1.0 + alpha) / 4.0;
  const double neg = (alpha - 1.0) / 4.0;
  k.d0 = embedding_constant(basis, 0.0, lo);
  k.d1 = embedding_constant(basis, 0.0, mid);
  k.d2 = embedding_constant(basis, 0.0, hi);
  k.d3 = embedding_constant(basis, neg, 0.0);
  k.d4 = embedding_constant(basis, neg, lo);
  k.d5 = embedding_constant(basis, neg, hi);

  const auto sq = [](double x) { return x * x; };
  k.c1 = std::min(k.omega_t0 / 2.0, 1.0);
  k.c2 = std::max({1.0 + 4.0 * sq(k.d2) / sq(k.d1) + 2.0 * sq(k.d2) / sq(k.d0), 2.0 * (1.0 + k.W), 3.0});
  k.C1 = std::min(1.0, 1.0 / sq(k.d4));
  k.C2 = std::max(3.0 * k.mu_max + sq(k.d5) / sq(k.d3), 2.0);
  k.C_eps = C_eps;
  k.D1 = k.c1 * k.C1;
  k.D2 = k.c2 * k.C2;
  k.D3 = 2.0 * C_eps;
  k.M0 = k.c2 / k.c1;
  k.M1 = 20.0 * C_eps / k.c1;
  k.R_absorb = (1.0 + 2.0 * k.M1) / k.C1;
  k.eps = decay_rate(omega, k, t0);
  return k;
}

double decay_rate(const OmegaModel& omega, const StructuralConstants& k, double t) {
  return std::min({1.0, eval_omega(omega, t) / 4.0, k.c1 / (4.0 * (k.W + 2.0)), k.d0 * k.d0 / (3.0 * k.d1 * k.d1)});
}

bool AssumptionReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.pass; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<double> uniform_grid(double t_begin, double t_end, int count) {
  if (count < 2) throw std::invalid_argument("sampling grid needs at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    g[static_cast<std::size_t>(i)] = t_begin + (t_end - t_begin) * i / (count - 1);
  }
  return g;
}

namespace {

// Largest sampled Hoelder quotient |g(t)-g(s)| / |t-s|^exponent over all pairs.
template <typename F>
std::pair<double, double> holder_quotient(const std::vector<double>& grid, F&& g, double exponent) {
  double worst = 0.0;
  double witness = grid.empty() ? 0.0 : grid.front();
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = g(grid[i]);
  // Uniform grids: the denominator depends on the lag only.
  bool uniform = grid.size() > 2;
  const double step = grid.size() > 1 ? grid[1] - grid[0] : 0.0;
  for (std::size_t i = 1; uniform && i < grid.size(); ++i) {
    uniform = step > 0.0 && std::abs(grid[i] - grid[i - 1] - step) <= 1e-9 * step;
  }
  if (uniform) {
    for (std::size_t lag = 1; lag < grid.size(); ++lag) {
      const double den = std::pow(step * static_cast<double>(lag), exponent);
      for (std::size_t i = 0; i + lag < grid.size(); ++i) {
        const double q = std::abs(values[i + lag] - values[i]) / den;
        if (q > worst) {
          worst = q;
          witness = grid[i];
        }
      }
    }
    return {worst, witness};
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double dt = std::abs(grid[j] - grid[i]);
      if (dt == 0.0) continue;
      const double q = std::abs(values[j] - values[i]) / std::pow(dt, exponent);
      if (q > worst) {
        worst = q;
        witness = grid[i];
      }
    }
  }
  return {worst, witness};
}

} // namespace

AssumptionReport check_assumptions(const OmegaModel& omega, const MuModel& mu, double alpha,
                                   const SpectralBasis& basis, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("check_assumptions: empty sample grid");
  std::vector<double> times = grid;
  std::sort(times.begin(), times.end());

  AssumptionReport report;
  const double t0 = times.back();
  const StructuralConstants k = compute_constants(omega, mu, alpha, basis, 0.0, t0);
  report.c1 = k.c1;
  report.epsilon = decay_rate(omega, k, t0);
  const double rel = 1e-12;

  {
    AssumptionCheck c{"omega_positive", true, std::numeric_limits<double>::infinity(), 0.0, times.front(), ""};
    for (double t : times) {
      const double w = eval_omega(omega, t);
      if (w < c.worst) {
        c.worst = w;
        c.witness_t = t;
      }
    }
    c.pass = c.worst > 0.0;
    c.detail = "min omega(t) over samples must be > 0";
    report.checks.push_back(c);
  }
  {
    AssumptionCheck c{"omega_nonincreasing", true, -std::numeric_limits<double>::infinity(), 0.0, times.front(), ""};
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
      const double rise = eval_omega(omega, times[i + 1]) - eval_omega(omega, times[i]);
      const double slope = eval_omega_prime(omega, times[i]);
      const double worst = std::max(rise, slope);
      if (worst > c.worst) {
        c.worst = worst;
        c.witness_t = times[i];
      }
    }
    c.pass = c.worst <= rel * omega_sup(omega);
    c.detail = "largest increment or derivative of omega must be <= 0";
    report.checks.push_back(c);
  }
  {
    AssumptionCheck c{"omega_bounded", true, 0.0, k.W, times.front(), ""};
    for (double t : times) {
      const double w = eval_omega(omega, t);
      if (w > c.worst) {
        c.worst = w;
        c.witness_t = t;
      }
    }
    c.pass = std::isfinite(k.W) && c.worst <= k.W * (1.0 + rel);
    c.detail = "omega(t) <= W";
    report.checks.push_back(c);
  }
  {
    const auto [q, at] = holder_quotient(times, [&](double t) { return eval_omega(omega, t); }, omega.holder.exponent);
    AssumptionCheck c{"omega_holder", q <= omega.holder.constant * (1.0 + 1e-9), q, omega.holder.constant, at,
                      "sampled Hoelder quotient of omega vs declared kappa_0"};
    c.pass = c.pass && omega.holder.exponent > 0.0 && omega.holder.exponent <= 1.0;
    report.checks.push_back(c);
  }
  {
    AssumptionCheck c{"mu_bounds", true, 0.0, 0.0, times.front(), "mu_min <= mu(t) <= mu_max"};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double t_lo = times.front();
    double t_hi = times.front();
    for (double t : times) {
      const double m = eval_mu(mu, t);
      if (m < lo) {
        lo = m;
        t_lo = t;
      }
      if (m > hi) {
        hi = m;
        t_hi = t;
      }
    }
    const bool lo_ok = lo >= k.mu_min * (1.0 - rel) && k.mu_min > 0.0;
    const bool hi_ok = hi <= k.mu_max * (1.0 + rel);
    c.pass = lo_ok && hi_ok;
    c.worst = lo_ok ? hi : lo;
    c.limit = lo_ok ? k.mu_max : k.mu_min;
    c.witness_t = lo_ok ? t_hi : t_lo;
    report.checks.push_back(c);
  }
  if (mu.kind != MuModel::Kind::Constant) {
    AssumptionCheck c{"mu_increasing", true, std::numeric_limits<double>::infinity(), 0.0, times.front(),
                      "mu'(t) > 0 on every sample"};
    for (double t : times) {
      const double d = eval_mu_prime(mu, t);
      if (d < c.worst) {
        c.worst = d;
        c.witness_t = t;
      }
    }
    c.pass = c.worst > 0.0;
    report.checks.push_back(c);
  }
  {
    const auto [q, at] = holder_quotient(times, [&](double t) { return eval_mu(mu, t); }, mu.holder.exponent);
    AssumptionCheck c{"mu_holder", q <= mu.holder.constant * (1.0 + 1e-9), q, mu.holder.constant, at,
                      "sampled Hoelder quotient of mu vs declared kappa"};
    c.pass = c.pass && mu.holder.exponent >= 0.5 && mu.holder.exponent <= 1.0;
    report.checks.push_back(c);
  }
  {
    // sup_{s <= t} vartheta(s) <= eps_omega(t)^2, running supremum from the left.
    AssumptionCheck c{"mu_envelope", true, -std::numeric_limits<double>::infinity(), 0.0, times.front(),
                      "running sup of mu'/mu minus eps_omega(t)^2 must be <= 0"};
    double running = -std::numeric_limits<double>::infinity();
    for (double t : times) {
      running = std::max(running, mu_envelope(mu, t));
      const double eps = decay_rate(omega, k, t);
      const double excess = running - eps * eps;
      if (excess > c.worst) {
        c.worst = excess;
        c.limit = eps * eps;
        c.witness_t = t;
      }
    }
    c.pass = c.worst <= 0.0;
    report.checks.push_back(c);
  }
  {
    const double lhs = std::pow(k.mu_min, -alpha) * k.d2 * k.d2 / (k.d0 * k.d0);
    AssumptionCheck c{"W_large_enough", lhs <= (k.W + 2.0) / 2.0, lhs, (k.W + 2.0) / 2.0, t0,
                      "mu_min^{-alpha} d2^2/d0^2 <= (W+2)/2"};
    report.checks.push_back(c);
  }
  {
    const double lhs = 2.0 * std::cos(M_PI * alpha / 2.0) * std::pow(k.mu_min, -alpha / 2.0) * k.d2 * k.d2 / (k.d1 * k.d1);
    AssumptionCheck c{"alpha_close_to_one", lhs <= (k.W + 2.0) / 2.0, lhs, (k.W + 2.0) / 2.0, t0,
                      "2 cos(pi alpha/2) mu_min^{-alpha/2} d2^2/d1^2 <= (W+2)/2"};
    report.checks.push_back(c);
  }
  {
    const auto [q, at] = holder_quotient(times, [&](double t) { return std::pow(eval_mu(mu, t), alpha / 2.0); }, 0.25);
    report.mu_power_holder = q;
    AssumptionCheck c{"mu_power_holder", std::isfinite(q), q, mu_power_holder_quarter(mu, alpha / 2.0), at,
                      "empirical (1/4)-Hoelder constant of mu^{alpha/2}"};
    c.pass = c.pass && q <= c.limit * (1.0 + 1e-9);
    report.checks.push_back(c);
  }
  return report;
}

double max_admissible_mu_steepness(const OmegaModel& omega, MuModel mu, double alpha,
                                   const SpectralBasis& basis, const std::vector<double>& grid) {
  const auto passes = [&](double steepness) {
    MuModel trial = MuModel::logistic_rise(mu.min, mu.max, steepness);
    trial.holder.exponent = mu.holder.exponent;
    return check_assumptions(omega, trial, alpha, basis, grid).all_pass();
  };
  double lo = 0.0;
  double hi = 1.0;
  while (passes(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return hi;
  }
  if (lo == 0.0) {
    lo = hi;
    while (!passes(lo)) {
      hi = lo;
      lo /= 2.0;
      if (lo < 1e-14) return 0.0;
    }
  }
  while ((hi - lo) > 1e-6 * lo) {
    const double midpoint = 0.5 * (lo + hi);
    (passes(midpoint) ? lo : hi) = midpoint;
  }
  return lo;
}

double mu_power_holder_quarter(const MuModel& mu, double p) {
  const double lo = mu_lower(mu);
  const double hi = mu_upper(mu);
  const double range = std::abs(std::pow(hi, p) - std::pow(lo, p));
  if (range == 0.0) return 0.0;
  // |mu^p(t) - mu^p(s)| <= min(L kappa |t-s|^gamma, range), L = sup |p mu^{p-1}|.
  const double lip = std::abs(p) * std::max(std::pow(lo, p - 1.0), std::pow(hi, p - 1.0));
  const double gamma = mu.holder.exponent;
  const double kappa = mu.holder.constant;
  if (kappa == 0.0) return 0.0;
  // The quotient min(a r^gamma, range)/r^{1/4} peaks where both branches meet.
  const double r_star = std::pow(range / (lip * kappa), 1.0 / gamma);
  return range / std::pow(r_star, 0.25);
}

} // namespace oscillon
