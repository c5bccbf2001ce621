#include <doctest.h>

#include <cmath>

#include "oscillon/diagnostics.hpp"
#include "oscillon/random.hpp"

using namespace oscillon;
using doctest::Approx;

namespace {

Models default_models() {
  Models m;
  m.omega = OmegaModel::logistic_decay(0.5, 2.0, 0.1);
  m.mu = MuModel::logistic_rise(1.0, 2.0, 0.002);
  return m;
}

State random_state(const SpectralBasis& b, std::uint64_t seed, double scale) {
  CounterRng rng(seed, 9);
  return {rng.next_normals(static_cast<Eigen::Index>(b.size())) * scale,
          rng.next_normals(static_cast<Eigen::Index>(b.size())) * scale};
}

} // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("natural energy") {
  const SpectralBasis b(3, 4);
  Models m;
  m.mu = MuModel::constant(1.0);
  const Field zero = Field::Zero(static_cast<Eigen::Index>(b.size()));
  CHECK(natural_energy(b, m, 0.9, 0.0, zero, zero) == 0.0);

  Field u = zero;
  u[0] = 1.3;
  CHECK(natural_energy(b, m, 0.9, 0.0, u, zero) == Approx((std::pow(3.0, 0.95) + 1.0) * 1.69).epsilon(1e-14));

  const State w = random_state(b, 1, 1.0);
  CHECK(natural_energy(b, m, 0.9, 0.0, 2.5 * w.u, 2.5 * w.v) ==
        Approx(6.25 * natural_energy(b, m, 0.9, 0.0, w.u, w.v)).epsilon(1e-13));
}

TEST_CASE("functionals vanish at zero") {
  const SpectralBasis b(3, 4);
  const Models m = default_models();
  const State z = State::zero(b.size());
  CHECK(phi_functional(b, m, 0.9, 0.0, 0.04, z.u, z.u) == 0.0);
  CHECK(lyapunov_L(b, m, 0.9, 0.0, 0.04, z) == 0.0);
}

TEST_CASE("quadratic Phi is positive for small eps") {
  const SpectralBasis b(3, 4);
  Models m = default_models();
  m.nonlin = NonlinearitySpec{0.0, 0.0, 4.0};
  for (std::uint64_t s = 0; s < 100; ++s) {
    const State w = random_state(b, s, 1.0);
    CHECK(phi_functional(b, m, 0.9, 1.0, 0.01, w.u, w.v) > 0.0);
  }
}

TEST_CASE("Lyapunov identity") {
  const SpectralBasis b(3, 4);
  const Models m = default_models();
  const EnergyFunctionals fn(b, m, 0.9, 0.039);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const double t = -50.0 + 0.1 * static_cast<double>(s);
    const State w = random_state(b, s, 0.05 + 0.002 * static_cast<double>(s));
    const double L = fn.lyapunov(t, w);
    const double P = fn.phi(t, w.u, fn.velocity(t, w));
    worst = std::max(worst, std::abs(L - P) / std::max(1.0, std::abs(P)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("two-sided bounds and norm equivalence") {
  const SpectralBasis b(3, 4);
  const Models m = default_models();
  const StructuralConstants k = run_constants(b, m, 0.9, 0.0);
  const EnergyFunctionals fn(b, m, 0.9, k.eps);
  const auto samples = bound_samples(fn, 0.0, 400, 1e-2, 1e3, 3);
  CHECK(samples.size() == 400);
  const TwoSidedBoundsReport rep = two_sided_bounds(fn, k, 0.0, samples);
  for (const auto& c : rep.checks) {
    INFO(c.name);
    CHECK(c.violations == 0);
  }
  CHECK(rep.equivalence.C1 <= rep.equivalence.C2);
  CHECK(rep.equivalence.min_ratio >= rep.equivalence.sharp_lower);
  CHECK(rep.equivalence.max_ratio <= rep.equivalence.sharp_upper);
  CHECK(rep.identity_max_error < 1e-10);
}

TEST_CASE("norm equivalence near the unitary limit") {
  const SpectralBasis b(3, 4);
  Models m;
  m.mu = MuModel::constant(1.0);
  const State w = random_state(b, 5, 1.0);
  const EnergyFunctionals near(b, m, 0.9999, 0.01);
  const EnergyFunctionals at(b, m, 1.0, 0.01);
  const double q = w.u.cwiseProduct(b.eigenvalues().cwiseSqrt()).squaredNorm() + w.v.squaredNorm();
  CHECK(near.state_energy(0.0, w) / q == Approx(at.state_energy(0.0, w) / q).epsilon(1e-3));
}

TEST_CASE("decay check on the zero state") {
  const SpectralBasis b(3, 4);
  const Models m = default_models();
  const StructuralConstants k = run_constants(b, m, 0.9, 0.0);
  const EnergyFunctionals fn(b, m, 0.9, k.eps);
  const Integrator integ(b, m, 0.9);
  const TrajectoryRecord rec = integ.evolve(State::zero(b.size()), -1.0, 0.0, 0.01);
  const DecayReport rep = decay_estimate_check(rec, fn, k);
  CHECK(rep.bound_holds);
  CHECK(rep.worst_margin == Approx(k.M1));
}

TEST_CASE("absorbing entry time") {
  StructuralConstants k;
  k.M0 = 10.0;
  k.M1 = 4.0;
  CHECK(absorbing_entry_time(k, 0.5, 0.1) == 0.0);
  CHECK(absorbing_entry_time(k, 0.5, 5.0) == Approx(2.0 * std::log(10.0)));
}

TEST_CASE("zero ensemble is absorbed") {
  const SpectralBasis b(3, 2);
  const Models m = default_models();
  const StructuralConstants k = run_constants(b, m, 0.9, 0.0);
  const EnergyFunctionals fn(b, m, 0.9, k.eps);
  const Integrator integ(b, m, 0.9);
  EnsembleSpec ens;
  ens.count = 3;
  ens.energy = 0.0;
  const AbsorbingReport rep = absorbing_experiment(integ, fn, k, 0.0, ens, 0.01, 1.0);
  CHECK(rep.absorbed);
  CHECK(rep.worst_norm_sq == 0.0);
}

TEST_CASE("ensembles are reproducible and scaled") {
  const SpectralBasis b(3, 4);
  const Models m = default_models();
  const EnergyFunctionals fn(b, m, 0.9, 0.03);
  EnsembleSpec ens;
  ens.count = 4;
  ens.energy = 7.0;
  const auto a = generate_ensemble(ens, fn, 1.0);
  const auto c = generate_ensemble(ens, fn, 1.0);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].u == c[i].u);
    CHECK(fn.state_energy(1.0, a[i]) == Approx(7.0).epsilon(1e-12));
  }
  CHECK(a[0].u != a[1].u);
  ens.at_rest = true;
  for (const auto& w : generate_ensemble(ens, fn, 1.0)) CHECK(fn.velocity(1.0, w).norm() < 1e-12);
}

TEST_CASE("Hausdorff semidistance") {
  const SpectralBasis b(3, 2);
  const State p = random_state(b, 1, 1.0);
  const State q = random_state(b, 2, 1.0);
  const State r = random_state(b, 3, 1.0);
  const std::vector<State> A{p, q};
  CHECK(hausdorff_semidistance(A, A, b, 0.9) == 0.0);

  const State diff{p.u - q.u, p.v - q.v};
  CHECK(hausdorff_semidistance({p}, {q}, b, 0.9) == Approx(pullback_norm(diff, b, 0.9)));
  CHECK(hausdorff_semidistance({p}, {p, q}, b, 0.9) == 0.0);
  CHECK(hausdorff_semidistance({p, q}, {p}, b, 0.9) > 0.0);

  for (int i = 0; i < 20; ++i) {
    const std::vector<State> X{random_state(b, 10 + i, 1.0)};
    const std::vector<State> Y{random_state(b, 40 + i, 1.0), r};
    const std::vector<State> Z{random_state(b, 70 + i, 1.0)};
    CHECK(hausdorff_semidistance(X, Z, b, 0.9) <=
          hausdorff_semidistance(X, Y, b, 0.9) + hausdorff_semidistance(Y, Z, b, 0.9) + 1e-12);
  }
}

TEST_CASE("tail energy fractions") {
  const SpectralBasis b(3, 4);
  State low = State::zero(b.size());
  low.u[0] = 1.0;
  low.v[0] = -2.0;
  for (const auto& row : tail_energy_compactness({low}, b, {3.0, 6.0, 20.0})) CHECK(row.fraction == 0.0);

  std::vector<State> white;
  for (std::uint64_t s = 0; s < 400; ++s) white.push_back(random_state(b, s, 1.0));
  const double cut = b.nu_median();
  const auto rows = tail_energy_compactness(white, b, {cut, b.nu_max()});
  long above = 0;
  for (std::size_t k = 0; k < b.size(); ++k) above += b.eigenvalue(k) > cut;
  const double share = static_cast<double>(above) / static_cast<double>(b.size());
  CHECK(rows[0].fraction >= share);
  CHECK(rows[0].fraction < share + 0.3);
  CHECK(rows[1].fraction == 0.0);
}

TEST_CASE("linear spectral gap matches the per-mode eigenvalues") {
  const SpectralBasis b(3, 4);
  const double gap = linear_spectral_gap(b, 1.0, 0.1, 0.9);
  CHECK(gap > 0.0);
  CHECK(linear_spectral_gap(b, 1.0, 0.0, 1.0) == Approx(0.0).scale(1.0));

  Models m;
  m.omega = OmegaModel::constant(0.1);
  m.mu = MuModel::constant(1.0);
  m.nonlin = NonlinearitySpec{0.0, 0.0, 4.0};
  const Integrator integ(b, m, 0.9);
  State w = State::zero(b.size());
  w.u[0] = 1.0;
  const State a = integ.evolve_to(w, 0.0, 40.0, 0.01);
  const State c = integ.evolve_to(w, 0.0, 80.0, 0.01);
  const double rate = std::log(pullback_norm(a, b, 0.9) / pullback_norm(c, b, 0.9)) / 40.0;
  CHECK(rate == Approx(gap).epsilon(0.05));
}

}
