#include "oscillon/dynamics.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "oscillon/io.hpp"

namespace oscillon {

std::complex<double> phi_function(int k, std::complex<double> z) {
  if (k < 0 || k > 2) throw std::invalid_argument("phi_function supports k = 0, 1, 2");
  if (k == 0) return std::exp(z);
  if (std::abs(z) < 0.5) {
    // sum_j z^j/(j+k)!; 0.5^20/20! is far below rounding.
    std::complex<double> term = 1.0;
    double fact = 1.0;
    for (int j = 1; j <= k; ++j) fact *= j;
    term /= fact;
    std::complex<double> sum = term;
    for (int j = 1; j < 20; ++j) {
      term *= z / static_cast<double>(j + k);
      sum += term;
    }
    return sum;
  }
  const std::complex<double> e = std::exp(z);
  if (k == 1) return (e - 1.0) / z;
  return (e - 1.0 - z) / (z * z);
}

BlockPropagator block_propagator(const Block2& B, double h) {
  const double mc = 0.5 * (B(0, 0) + B(1, 1));
  Block2 K = B - mc * Block2::Identity();
  const double k2 = K(0, 1) * K(1, 0); // K^2 = k2 I
  BlockPropagator p;
  if (k2 < 0.0) {
    const double ms = std::sqrt(-k2);
    const Block2 J = K / ms;
    const std::complex<double> z(-h * mc, -h * ms);
    const auto lift = [&](std::complex<double> g) -> Block2 {
      return g.real() * Block2::Identity() + g.imag() * J;
    };
    p.expo = lift(phi_function(0, z));
    p.phi1 = lift(phi_function(1, z));
    p.phi2 = lift(phi_function(2, z));
    return p;
  }
  // Real eigenvalues -h mc -+ h r: spectral projectors (I +- K/r)/2. Not
  // reachable for admissible blocks; kept as a guard.
  const double r = std::sqrt(k2);
  if (r == 0.0 && !K.isZero()) throw std::domain_error("block_propagator: defective 2x2 block");
  const double a = -h * mc;
  const auto apply = [&](int k) -> Block2 {
    if (r == 0.0) return phi_function(k, a).real() * Block2::Identity();
    const double gp = phi_function(k, a - h * r).real();
    const double gm = phi_function(k, a + h * r).real();
    return 0.5 * (gp + gm) * Block2::Identity() + (0.5 * (gp - gm) / r) * K;
  };
  p.expo = apply(0);
  p.phi1 = apply(1);
  p.phi2 = apply(2);
  return p;
}

Integrator::Integrator(const SpectralBasis& basis, const Models& models, double alpha)
    : basis_(basis), models_(models), alpha_(alpha), op_(models.nonlin, basis) {
  require_alpha(alpha);
}

namespace {

bool exceeds_threshold(const State& w) { return !w.all_finite() || w.max_abs() > kBlowUpThreshold; }

} // namespace

State Integrator::step(const State& w, double t, double t_next) const {
  const double h = t_next - t;
  if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
  require_length(basis_, w.u.size());
  require_length(basis_, w.v.size());
  const double mu_mid = eval_mu(models_.mu, 0.5 * (t + t_next));
  const State n0 = rhs_F(op_, models_.omega, t, w);

  const auto n = static_cast<Eigen::Index>(basis_.size());
  std::vector<BlockPropagator> props(static_cast<std::size_t>(n));
  State a{Field(n), Field(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Block2 B = lambda_matrix(mu_mid, alpha_, basis_.eigenvalue(static_cast<std::size_t>(k)));
    props[static_cast<std::size_t>(k)] = block_propagator(B, h);
    const auto& p = props[static_cast<std::size_t>(k)];
    const Eigen::Vector2d wk(w.u[k], w.v[k]);
    const Eigen::Vector2d nk(n0.u[k], n0.v[k]);
    const Eigen::Vector2d ak = p.expo * wk + h * (p.phi1 * nk);
    a.u[k] = ak[0];
    a.v[k] = ak[1];
  }
  if (exceeds_threshold(a)) return a;
  const State n1 = rhs_F(op_, models_.omega, t_next, a);
  State out{Field(n), Field(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& p = props[static_cast<std::size_t>(k)];
    const Eigen::Vector2d dk(n1.u[k] - n0.u[k], n1.v[k] - n0.v[k]);
    const Eigen::Vector2d ok = Eigen::Vector2d(a.u[k], a.v[k]) + h * (p.phi2 * dk);
    out.u[k] = ok[0];
    out.v[k] = ok[1];
  }
  return out;
}

long step_count(double tau, double t_end, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step size h must be positive");
  if (t_end < tau) throw std::invalid_argument("t_end must not precede tau");
  const double span = t_end - tau;
  const double steps = span / h;
  const long n = std::lround(steps);
  if (std::abs(steps - static_cast<double>(n)) > 1e-9 * std::max(1.0, steps)) {
    throw std::invalid_argument("step size does not divide the time span");
  }
  return n;
}

namespace {

// Grid time i of a run starting at tau. On the lattice h Z the time is
// (k0 + i) h, which does not depend on where the run started.
struct TimeGrid {
  double tau;
  double h;
  bool lattice;
  long k0;

  TimeGrid(double tau_, double h_) : tau(tau_), h(h_) {
    const double q = tau / h;
    k0 = std::lround(q);
    lattice = std::abs(q - static_cast<double>(k0)) <= 1e-9 * std::max(1.0, std::abs(q));
  }
  double at(long i) const { return lattice ? static_cast<double>(k0 + i) * h : tau + static_cast<double>(i) * h; }
};

} // namespace

TrajectoryRecord Integrator::evolve(const State& initial, double tau, double t_end, double h, int stride) const {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const long n = step_count(tau, t_end, h);
  const TimeGrid grid(tau, h);
  TrajectoryRecord rec;
  rec.h = h;
  rec.alpha = alpha_;
  rec.times.push_back(tau);
  rec.states.push_back(initial);
  State w = initial;
  for (long i = 0; i < n; ++i) {
    const double t0 = i == 0 ? tau : grid.at(i);
    const double t1 = i + 1 == n ? t_end : grid.at(i + 1);
    w = step(w, t0, t1);
    if (exceeds_threshold(w)) {
      rec.blew_up = true;
      rec.blow_up_time = t1;
      break;
    }
    if ((i + 1) % stride == 0 || i + 1 == n) {
      rec.times.push_back(t1);
      rec.states.push_back(w);
    }
  }
  return rec;
}

State Integrator::evolve_to(const State& initial, double tau, double t_end, double h, bool* blew_up) const {
  const long n = step_count(tau, t_end, h);
  const TimeGrid grid(tau, h);
  State w = initial;
  if (blew_up) *blew_up = false;
  for (long i = 0; i < n; ++i) {
    const double t0 = i == 0 ? tau : grid.at(i);
    const double t1 = i + 1 == n ? t_end : grid.at(i + 1);
    w = step(w, t0, t1);
    if (exceeds_threshold(w)) {
      if (blew_up) *blew_up = true;
      break;
    }
  }
  return w;
}

State Integrator::apply_lambda(const State& w, double t) const {
  const double mu = eval_mu(models_.mu, t);
  State out{Field(w.u.size()), Field(w.v.size())};
  for (Eigen::Index k = 0; k < w.u.size(); ++k) {
    const Block2 B = lambda_matrix(mu, alpha_, basis_.eigenvalue(static_cast<std::size_t>(k)));
    out.u[k] = B(0, 0) * w.u[k] + B(0, 1) * w.v[k];
    out.v[k] = B(1, 0) * w.u[k] + B(1, 1) * w.v[k];
  }
  return out;
}

Field Integrator::velocity(const State& w, double t) const {
  require_length(basis_, w.u.size());
  // The first component of F vanishes, so u_t = -(Lambda^a w)_u.
  if (alpha_ == 1.0) return w.v;
  return -apply_lambda(w, t).u;
}

State step(const State& w, double t, double h, double alpha, const Models& models, const SpectralBasis& basis) {
  return Integrator(basis, models, alpha).step(w, t, t + h);
}

TrajectoryRecord evolve(const State& initial, double tau, double t_end, double h, double alpha, const Models& models,
                        const SpectralBasis& basis) {
  return Integrator(basis, models, alpha).evolve(initial, tau, t_end, h);
}

Field recover_velocity(const State& w, double t, double alpha, const Models& models, const SpectralBasis& basis) {
  require_alpha(alpha);
  require_length(basis, w.u.size());
  if (alpha == 1.0) return w.v;
  const double mu = eval_mu(models.mu, t);
  Field ut(w.u.size());
  for (Eigen::Index k = 0; k < w.u.size(); ++k) {
    const Block2 B = lambda_matrix(mu, alpha, basis.eigenvalue(static_cast<std::size_t>(k)));
    ut[k] = -B(0, 0) * w.u[k] - B(0, 1) * w.v[k];
  }
  return ut;
}

namespace {

static_assert(std::endian::native == std::endian::little, "state dumps assume a little-endian host");

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw std::runtime_error("state dump truncated");
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

} // namespace

void write_state_dump(const std::string& path, const SpectralBasis& basis, const TrajectoryRecord& rec) {
  std::string out = "OSCW";
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(basis.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(basis.modes_per_axis()));
  put<double>(out, rec.alpha);
  put<std::uint64_t>(out, rec.states.size());
  for (std::size_t i = 0; i < rec.states.size(); ++i) {
    require_length(basis, rec.states[i].u.size());
    put<double>(out, rec.times[i]);
    for (Eigen::Index k = 0; k < rec.states[i].u.size(); ++k) put<double>(out, rec.states[i].u[k]);
    for (Eigen::Index k = 0; k < rec.states[i].v.size(); ++k) put<double>(out, rec.states[i].v[k]);
  }
  atomic_write(path, out);
}

TrajectoryRecord read_state_dump(const std::string& path, int* dim, int* modes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "OSCW") throw std::runtime_error("not a state dump: " + path);
  const auto version = get<std::uint32_t>(in);
  if (version != 1) throw std::runtime_error("unsupported state dump version " + std::to_string(version));
  const auto d = get<std::uint32_t>(in);
  const auto m = get<std::uint32_t>(in);
  TrajectoryRecord rec;
  rec.alpha = get<double>(in);
  const auto count = get<std::uint64_t>(in);
  const SpectralBasis basis(static_cast<int>(d), static_cast<int>(m));
  const auto k = static_cast<Eigen::Index>(basis.size());
  for (std::uint64_t i = 0; i < count; ++i) {
    rec.times.push_back(get<double>(in));
    State w{Field(k), Field(k)};
    for (Eigen::Index j = 0; j < k; ++j) w.u[j] = get<double>(in);
    for (Eigen::Index j = 0; j < k; ++j) w.v[j] = get<double>(in);
    rec.states.push_back(std::move(w));
  }
  if (dim) *dim = static_cast<int>(d);
  if (modes) *modes = static_cast<int>(m);
  return rec;
}

} // namespace oscillon
