#include "oscillon/fracop.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

namespace oscillon {

ModeBlock lambda_block(double t, double alpha, double nu, const MuModel& mu_model) {
  require_alpha(alpha);
  require_nu(nu);
  const double mu = eval_mu(mu_model, t);
  return {lambda_matrix(mu, alpha, nu), alpha, mu, nu, t};
}

ModeBlock lambda_inverse_block(double t, double alpha, double nu, const MuModel& mu_model) {
  require_alpha(alpha);
  require_nu(nu);
  const double mu = eval_mu(mu_model, t);
  return {lambda_inverse_matrix(mu, alpha, nu), alpha, mu, nu, t};
}

std::pair<std::complex<double>, std::complex<double>> spectrum(double t, double alpha, double nu,
                                                                const MuModel& mu_model) {
  require_alpha(alpha);
  require_nu(nu);
  const double r = std::pow(eval_mu(mu_model, t) * nu, alpha / 2.0);
  const double phase = M_PI * (2.0 - alpha) / 2.0;
  if (alpha == 1.0) return {{0.0, r}, {0.0, -r}};
  return {std::polar(r, phase), std::polar(r, -phase)};
}

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights on the odd Kronrod nodes 1, 3, 5, 7.
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

using Vec4 = Eigen::Array4d;

struct Panel {
  double a, b;
  Vec4 value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename F>
Panel gauss_kronrod(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const Vec4 fc = f(c);
  Vec4 kron = kWgk[7] * fc;
  Vec4 gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[static_cast<std::size_t>(j)];
    const Vec4 s = f(c - dx) + f(c + dx);
    kron += kWgk[static_cast<std::size_t>(j)] * s;
    if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * s;
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, (kron - gauss).abs().maxCoeff()};
}

} // namespace

QuadratureResult balakrishnan_block(double t, double alpha, double nu, const MuModel& mu_model, double quad_tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("balakrishnan_block needs 0 < alpha < 1");
  }
  if (!(quad_tol > 0.0)) throw std::invalid_argument("quad_tol must be positive");
  require_nu(nu);
  const double mu = eval_mu(mu_model, t);
  const double m = mu * nu;
  const double pref = std::sin(M_PI * alpha) / M_PI;
  const double tail_budget = 0.05 * quad_tol / pref;

  // Below l0 every resolvent entry is at most max(1, 1/m, l0/m); the tail
  // is then bounded by that times l0^{1-a}/(1-a).
  double l0 = std::min(1.0, m);
  const auto lower_tail = [&](double l) { return std::max({1.0, 1.0 / m, l / m}) * std::pow(l, 1.0 - alpha) / (1.0 - alpha); };
  while (lower_tail(l0) > tail_budget) l0 *= 0.5;
  // Above l1 the entries are at most max(1, m/l1)/l, giving l1^{-a}/a.
  double l1 = std::max(1.0, m);
  const auto upper_tail = [&](double l) { return std::max(1.0, m / l) * std::pow(l, -alpha) / alpha; };
  while (upper_tail(l1) > tail_budget) l1 *= 2.0;

  // Integrand in y = log l: l^{1-a} (l I + B1)^{-1}, entries (11, 12, 21, 22).
  const auto f = [&](double y) {
    const double l = std::exp(y);
    const double w = std::pow(l, 1.0 - alpha) / (l * l + m);
    Vec4 r;
    r << l * w, w, -m * w, l * w;
    return r;
  };

  const double target = 0.9 * quad_tol / pref;
  std::priority_queue<Panel> heap;
  const double ya = std::log(l0);
  const double yb = std::log(l1);
  const int initial = 16;
  Vec4 total = Vec4::Zero();
  double err = 0.0;
  for (int i = 0; i < initial; ++i) {
    Panel p = gauss_kronrod(f, ya + (yb - ya) * i / initial, ya + (yb - ya) * (i + 1) / initial);
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  const int max_panels = 20000;
  while (err > target && static_cast<int>(heap.size()) < max_panels) {
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = gauss_kronrod(f, worst.a, mid);
    const Panel right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  QuadratureResult out;
  out.block.m << total(0), total(1), total(2), total(3);
  out.block.m *= pref;
  out.block.alpha = alpha;
  out.block.mu = mu;
  out.block.nu = nu;
  out.block.t = t;
  out.error_estimate = pref * (std::max(err, 0.0) + lower_tail(l0) + upper_tail(l1));
  out.intervals = static_cast<int>(heap.size());
  out.converged = out.error_estimate <= quad_tol;
  return out;
}

Block2 yt_metric_sqrt(double mu, double nu) {
  Block2 g = Block2::Zero();
  g(0, 0) = std::sqrt(std::sqrt(mu) * nu + 1.0);
  g(1, 1) = 1.0;
  return g;
}

double weighted_spectral_norm(const Block2& m, const Block2& g) {
  const Block2 conj = g * m * g.inverse();
  return Eigen::JacobiSVD<Block2>(conj).singularValues()(0);
}

std::vector<AlphaLimitRow> alpha_limit_report(double t, const Field& u, const Field& v, const MuModel& mu_model,
                                              const SpectralBasis& basis, const std::vector<double>& alphas) {
  if (alphas.empty()) throw std::invalid_argument("alpha_limit_report: empty alpha list");
  require_length(basis, u.size());
  require_length(basis, v.size());
  const double mu = eval_mu(mu_model, t);
  std::vector<AlphaLimitRow> rows;
  for (double alpha : alphas) {
    require_alpha(alpha);
    AlphaLimitRow row;
    row.alpha = alpha;
    double action_sq = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const double nu = basis.eigenvalue(k);
      const Block2 g = yt_metric_sqrt(mu, nu);
      const Block2 diff_inv = lambda_inverse_matrix(mu, alpha, nu) - lambda_inverse_matrix(mu, 1.0, nu);
      const double e = weighted_spectral_norm(diff_inv, g);
      if (e > row.inverse_error) {
        row.inverse_error = e;
        row.inverse_argmax_nu = nu;
      }
      const auto ki = static_cast<Eigen::Index>(k);
      const Eigen::Vector2d w(u[ki], v[ki]);
      const Eigen::Vector2d d = (lambda_matrix(mu, alpha, nu) - lambda_matrix(mu, 1.0, nu)) * w;
      action_sq += (g * d).squaredNorm();
    }
    row.action_error = std::sqrt(action_sq);
    if (row.inverse_error == 0.0) row.inverse_argmax_nu = basis.nu_min();
    rows.push_back(row);
  }
  return rows;
}

HolderEstimate hoelder_operator_estimate(double t, double tau, double s_ref, double alpha, const MuModel& mu_model,
                                         const SpectralBasis& basis) {
  require_alpha(alpha);
  const double mu_t = eval_mu(mu_model, t);
  const double mu_tau = eval_mu(mu_model, tau);
  const double mu_s = eval_mu(mu_model, s_ref);

  HolderEstimate est;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double nu = basis.eigenvalue(k);
    const Block2 e = (lambda_matrix(mu_t, alpha, nu) - lambda_matrix(mu_tau, alpha, nu)) *
                     lambda_inverse_matrix(mu_s, alpha, nu);
    // D e D^{-1} with D = diag(nu^{(1 + a th)/2}, nu^{a th/2}).
    Block2 g = e;
    g(0, 1) *= std::sqrt(nu);
    g(1, 0) /= std::sqrt(nu);
    const double col = std::max(std::abs(g(0, 0)) + std::abs(g(1, 0)), std::abs(g(0, 1)) + std::abs(g(1, 1)));
    est.lhs = std::max(est.lhs, col);
  }

  // Entry bounds with |mu(t)^p - mu(tau)^p| <= K_p |t - tau|^{1/4} and
  // mu(s)^q <= max(mu_min^q, mu_max^q):
  //   G11 = c^2 D_{a/2} mu_s^{-a/2} + s^2 D_{(a-1)/2} mu_s^{(1-a)/2}
  //   G12 = c s (D_{a/2} mu_s^{(-1-a)/2} - D_{(a-1)/2} mu_s^{-a/2})
  //   G21 = c s (D_{(1+a)/2} mu_s^{-a/2} - D_{a/2} mu_s^{(1-a)/2})
  //   G22 = s^2 D_{(1+a)/2} mu_s^{(-1-a)/2} + c^2 D_{a/2} mu_s^{-a/2}
  const double c = alpha == 1.0 ? 0.0 : std::cos(M_PI * alpha / 2.0);
  const double s = alpha == 1.0 ? 1.0 : std::sin(M_PI * alpha / 2.0);
  const double lo = mu_lower(mu_model);
  const double hi = mu_upper(mu_model);
  const auto sup_pow = [&](double q) { return std::max(std::pow(lo, q), std::pow(hi, q)); };
  const double k_half = mu_power_holder_quarter(mu_model, alpha / 2.0);
  const double k_low = mu_power_holder_quarter(mu_model, (alpha - 1.0) / 2.0);
  const double k_high = mu_power_holder_quarter(mu_model, (1.0 + alpha) / 2.0);
  const double q_m = sup_pow(-alpha / 2.0);
  const double q_p = sup_pow((1.0 - alpha) / 2.0);
  const double q_mm = sup_pow((-1.0 - alpha) / 2.0);
  const double b11 = c * c * k_half * q_m + s * s * k_low * q_p;
  const double b12 = c * s * (k_half * q_mm + k_low * q_m);
  const double b21 = c * s * (k_high * q_m + k_half * q_p);
  const double b22 = s * s * k_high * q_mm + c * c * k_half * q_m;
  est.constant = std::max(b11 + b21, b12 + b22);
  est.bound = est.constant * std::pow(std::abs(t - tau), 0.25);
  est.holds = est.lhs <= est.bound * (1.0 + 1e-12) + 1e-15;
  return est;
}

} // namespace oscillon
