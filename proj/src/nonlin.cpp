#include "oscillon/nonlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oscillon/random.hpp"

namespace oscillon {

int dealiased_refinement(double rho) { return static_cast<int>(std::ceil((rho + 1.0) / 2.0)); }

NonlinearOperator::NonlinearOperator(const NonlinearitySpec& spec, const SpectralBasis& basis)
    : spec_(spec), grid_(basis, spec.refinement) {
  if (!(spec.rho > 1.0)) throw std::invalid_argument("rho must exceed 1");
  if (spec.lambda_f < 0.0) throw std::invalid_argument("lambda_f must be nonnegative");
}

namespace {

// |s|^p by repeated multiplication when p is a small integer, else pow.
struct AbsPower {
  double p;
  int ip;

  explicit AbsPower(double p_) : p(p_), ip(p_ == std::floor(p_) && p_ >= 0.0 && p_ <= 16.0 ? int(p_) : -1) {}
  double operator()(double s) const {
    const double a = std::abs(s);
    if (ip < 0) return std::pow(a, p);
    double r = 1.0;
    for (int i = 0; i < ip; ++i) r *= a;
    return r;
  }
};

} // namespace

Field NonlinearOperator::apply(const Field& u) const {
  // Linear f: the grid round trip is the identity on retained modes.
  if (spec_.lambda_f == 0.0) return spec_.beta * u;
  GridValues g = grid_.inverse(u);
  const AbsPower pw(spec_.rho - 1.0);
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = spec_.beta * g[i] - spec_.lambda_f * pw(g[i]) * g[i];
  return grid_.forward(g);
}

double NonlinearOperator::potential(const Field& u) const {
  if (spec_.lambda_f == 0.0) return 0.5 * spec_.beta * u.squaredNorm();
  GridValues g = grid_.inverse(u);
  const AbsPower pw(spec_.rho + 1.0);
  const double c = spec_.lambda_f / (spec_.rho + 1.0);
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = 0.5 * spec_.beta * g[i] * g[i] - c * pw(g[i]);
  return grid_.integrate(g);
}

Field apply_f(const NonlinearitySpec& spec, const SpectralBasis& basis, const Field& u) {
  return NonlinearOperator(spec, basis).apply(u);
}

double potential(const NonlinearitySpec& spec, const SpectralBasis& basis, const Field& u) {
  return NonlinearOperator(spec, basis).potential(u);
}

namespace {

// sup_{x >= 0} (a x^2 - b x^{p+1}) = a x*^2 (p-1)/(p+1), x*^{p-1} = 2a/((p+1) b).
double quadratic_minus_power_sup(double a, double b, double p) {
  if (a <= 0.0) return 0.0;
  if (b <= 0.0) return std::numeric_limits<double>::infinity();
  const double x2 = std::pow(2.0 * a / ((p + 1.0) * b), 2.0 / (p - 1.0));
  return a * x2 * (p - 1.0) / (p + 1.0);
}

} // namespace

double c_epsilon(const NonlinearitySpec& spec, const SpectralBasis& basis, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("c_epsilon: eps must be positive");
  const double sup = quadratic_minus_power_sup(spec.beta - eps, spec.lambda_f, spec.rho);
  if (!std::isfinite(sup)) throw std::invalid_argument("c_epsilon: lambda_f = 0 with beta > eps has no finite bound");
  return basis.volume() * sup;
}

double potential_constant(const NonlinearitySpec& spec, const SpectralBasis& basis, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("potential_constant: eps must be positive");
  const double sup = quadratic_minus_power_sup(0.5 * spec.beta - eps, spec.lambda_f / (spec.rho + 1.0), spec.rho);
  if (!std::isfinite(sup)) throw std::invalid_argument("potential_constant: unbounded potential");
  return basis.volume() * sup;
}

State rhs_F(const NonlinearOperator& op, const OmegaModel& omega, double t, const State& w) {
  State out;
  out.u = Field::Zero(w.u.size());
  out.v = op.apply(w.u) - eval_omega(omega, t) * w.v;
  return out;
}

State rhs_F(const NonlinearitySpec& spec, const OmegaModel& omega, const SpectralBasis& basis, double t,
            const State& w) {
  return rhs_F(NonlinearOperator(spec, basis), omega, t, w);
}

ExponentPair check_admissible(int dim, double rho, double s, double alpha) {
  constexpr double slack = 1e-12;
  const double n = dim;
  if (dim >= 3) {
    const double lo = n / (n - 2.0);
    const double hi = (n + 2.0) / (n - 2.0);
    if (!(rho > lo && rho < hi)) {
      throw std::invalid_argument("rho = " + std::to_string(rho) + " outside (" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + ")");
    }
  } else if (!(rho > 1.0)) {
    throw std::invalid_argument("rho must exceed 1");
  }
  const double s_lo = n / 2.0 * (1.0 - 1.0 / rho) - 1.0 / rho;
  if (!(s > s_lo + slack && s < 1.0)) {
    throw std::invalid_argument("s = " + std::to_string(s) + " outside (" + std::to_string(s_lo) + ", 1)");
  }
  const double a_lo = n / 2.0 * (rho - 1.0) - rho * s;
  if (!(alpha >= a_lo - slack && alpha <= 1.0)) {
    throw std::invalid_argument("alpha = " + std::to_string(alpha) + " below " + std::to_string(a_lo));
  }
  return {(-n / 2.0 * (rho - 1.0) + rho * s) / alpha, (s - 1.0) / alpha};
}

double e_theta_norm(const SpectralBasis& basis, double alpha, double theta, const State& w) {
  return sobolev_norm(basis, w.u, (1.0 + alpha * theta) / 2.0) + sobolev_norm(basis, w.v, alpha * theta / 2.0);
}

NonlinearityBoundReport nonlinearity_bound_report(const NonlinearitySpec& spec, const OmegaModel& omega,
                                                  const SpectralBasis& basis, double alpha, double s_ref,
                                                  int n_samples, const std::vector<double>& magnitudes,
                                                  std::uint64_t seed, double t) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  NonlinearityBoundReport rep;
  rep.exponents = check_admissible(basis.dim(), spec.rho, s_ref, alpha);
  const NonlinearOperator op(spec, basis);
  const auto n = static_cast<Eigen::Index>(basis.size());
  std::uint64_t stream = 0;
  for (double mag : magnitudes) {
    CounterRng rng(seed, stream++);
    NonlinearityBoundRow row{mag, 0.0};
    for (int i = 0; i < n_samples; ++i) {
      State w{rng.next_normals(n), rng.next_normals(n)};
      const double norm = e_theta_norm(basis, alpha, rep.exponents.theta2, w);
      if (norm > 0.0) {
        w.u *= mag / norm;
        w.v *= mag / norm;
      }
      const State F = rhs_F(op, omega, t, w);
      const double num = e_theta_norm(basis, alpha, rep.exponents.theta1, F);
      const double den = 1.0 + std::pow(e_theta_norm(basis, alpha, rep.exponents.theta2, w), spec.rho);
      row.max_ratio = std::max(row.max_ratio, num / den);
    }
    rep.fitted_constant = std::max(rep.fitted_constant, row.max_ratio);
    rep.rows.push_back(row);
  }
  // Bounded means the ratio stops growing: the last magnitude step may not
  // raise it by more than 5%.
  const std::size_t m = rep.rows.size();
  rep.stabilizes = m < 2 || rep.rows[m - 1].max_ratio <= 1.05 * rep.rows[m - 2].max_ratio;
  return rep;
}

} // namespace oscillon
