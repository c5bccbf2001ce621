#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "oscillon/diagnostics.hpp"
#include "oscillon/dynamics.hpp"
#include "oscillon/random.hpp"

using namespace oscillon;
using doctest::Approx;

namespace {

Models free_models(double mu, double omega) {
  Models m;
  m.omega = OmegaModel::constant(omega);
  m.mu = MuModel::constant(mu);
  m.nonlin = NonlinearitySpec{0.0, 0.0, 4.0};
  return m;
}

Models default_models() {
  Models m;
  m.omega = OmegaModel::logistic_decay(0.5, 2.0, 0.1);
  m.mu = MuModel::logistic_rise(1.0, 2.0, 0.002);
  m.nonlin = NonlinearitySpec{};
  return m;
}

State random_state(const SpectralBasis& b, std::uint64_t seed, double scale) {
  CounterRng rng(seed, 3);
  State w;
  w.u = rng.next_normals(static_cast<Eigen::Index>(b.size())) * scale;
  w.v = rng.next_normals(static_cast<Eigen::Index>(b.size())) * scale;
  return w;
}

double yt_energy(const SpectralBasis& b, double mu, const State& w) {
  double e = 0.0;
  for (Eigen::Index k = 0; k < w.u.size(); ++k) e += mu * b.eigenvalues()[k] * w.u[k] * w.u[k] + w.v[k] * w.v[k];
  return e;
}

} // namespace

TEST_SUITE("dynamics") {

TEST_CASE("phi functions") {
  for (std::complex<double> z : {std::complex<double>(1e-3, 2e-3), std::complex<double>(0.3, -0.2),
                                 std::complex<double>(-4.0, 7.0)}) {
    CHECK(std::abs(phi_function(0, z) - std::exp(z)) < 1e-14 * std::abs(std::exp(z)));
    const auto p1 = phi_function(1, z);
    const auto p2 = phi_function(2, z);
    CHECK(std::abs(z * p1 + 1.0 - std::exp(z)) < 1e-13);
    CHECK(std::abs(z * p2 + 1.0 - p1) < 1e-13);
  }
  CHECK(std::abs(phi_function(1, 0.0) - 1.0) < 1e-16);
  CHECK(std::abs(phi_function(2, 0.0) - 0.5) < 1e-16);
}

TEST_CASE("block propagator is the matrix exponential") {
  const Block2 B = lambda_block(0.0, 0.7, 5.0, MuModel::constant(1.3)).m;
  const double h = 0.05;
  Block2 e = Block2::Identity();
  Block2 term = Block2::Identity();
  for (int j = 1; j < 40; ++j) {
    term = term * (-h * B) / j;
    e += term;
  }
  CHECK((block_propagator(B, h).expo - e).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("unitary limit conserves the weighted energy") {
  const SpectralBasis b(3, 4);
  const Integrator integ(b, free_models(1.7, 0.0), 1.0);
  const State w0 = random_state(b, 1, 1.0);
  const State w1 = integ.step(w0, 0.0, 0.01);
  CHECK(yt_energy(b, 1.7, w1) == Approx(yt_energy(b, 1.7, w0)).epsilon(1e-12));
  const State wn = integ.evolve_to(w0, 0.0, 100.0, 0.01);
  CHECK(std::abs(yt_energy(b, 1.7, wn) / yt_energy(b, 1.7, w0) - 1.0) < 1e-10);
}

TEST_CASE("damping is monotone for alpha below one") {
  const SpectralBasis b(3, 4);
  for (double omega : {0.0, 0.5}) {
    const Integrator integ(b, free_models(1.3, omega), 0.9);
    State w = random_state(b, 2, 1.0);
    double prev = yt_energy(b, 1.3, w);
    for (int i = 0; i < 200; ++i) {
      w = integ.step(w, i * 0.01, (i + 1) * 0.01);
      const double e = yt_energy(b, 1.3, w);
      CHECK(e < prev);
      prev = e;
    }
  }
}

TEST_CASE("linear constant-coefficient step is exact") {
  const SpectralBasis b(2, 3);
  const Integrator integ(b, free_models(1.0, 0.0), 0.8);
  const State w0 = random_state(b, 4, 1.0);
  const State one = integ.step(w0, 0.0, 0.4);
  const State many = integ.evolve_to(w0, 0.0, 0.4, 0.01);
  CHECK((one.u - many.u).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((one.v - many.v).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("process laws") {
  const SpectralBasis b(3, 4);
  const Integrator integ(b, default_models(), 0.9);
  const State w0 = random_state(b, 5, 0.3);

  const TrajectoryRecord same = integ.evolve(w0, 2.0, 2.0, 0.01);
  REQUIRE(same.times.size() == 1);
  CHECK(same.states[0].u == w0.u);
  CHECK(same.states[0].v == w0.v);

  const State direct = integ.evolve_to(w0, -1.0, 1.0, 0.01);
  const State split = integ.evolve_to(integ.evolve_to(w0, -1.0, 0.25, 0.01), 0.25, 1.0, 0.01);
  CHECK(direct.u == split.u);
  CHECK(direct.v == split.v);

  const TrajectoryRecord rec = integ.evolve(w0, -1.0, 1.0, 0.01, 10);
  CHECK(rec.times.size() == 21);
  for (std::size_t i = 1; i < rec.times.size(); ++i) CHECK(rec.times[i] > rec.times[i - 1]);
  CHECK(rec.states.back().u == direct.u);

  CHECK_THROWS_AS(step_count(0.0, 1.0, 0.3), std::invalid_argument);
  CHECK(step_count(-50.0, 0.0, 0.01) == 5000);
}

TEST_CASE("velocity recovery") {
  const SpectralBasis b(3, 4);
  const Models m = default_models();
  const State w = random_state(b, 6, 1.0);
  CHECK(recover_velocity(w, 0.0, 1.0, m, b) == w.v);
  CHECK(recover_velocity(State::zero(b.size()), 0.0, 0.9, m, b).isZero(0.0));

  // centered difference of u along a trajectory
  const Integrator integ(b, m, 0.9);
  const double h = 1e-3;
  const TrajectoryRecord rec = integ.evolve(random_state(b, 7, 0.2), 0.0, 0.2, h);
  const std::size_t i = 100;
  const Field fd = (rec.states[i + 1].u - rec.states[i - 1].u) / (2.0 * h);
  const Field ut = integ.velocity(rec.states[i], rec.times[i]);
  CHECK((fd - ut).norm() < 1e-4 * ut.norm());
}

TEST_CASE("rhs is the derivative of the step at small h") {
  const SpectralBasis b(3, 4);
  const Models m = default_models();
  const Integrator integ(b, m, 0.9);
  const State w = random_state(b, 8, 0.3);
  const State lw = integ.apply_lambda(w, 0.0);
  const State F = rhs_F(integ.nonlinear(), m.omega, 0.0, w);
  std::vector<double> errs;
  for (double h : {1e-3, 1e-4, 1e-5}) {
    const State s = integ.step(w, 0.0, h);
    const Field du = (s.u - w.u) / h - (F.u - lw.u);
    const Field dv = (s.v - w.v) / h - (F.v - lw.v);
    errs.push_back(std::sqrt(du.squaredNorm() + dv.squaredNorm()));
  }
  // first order in h
  CHECK(errs[1] < 0.2 * errs[0]);
  CHECK(errs[2] < 0.2 * errs[1]);
}

TEST_CASE("dissipativity from energy 10") {
  const SpectralBasis b(3, 4);
  const Models m = default_models();
  const Integrator integ(b, m, 0.9);
  const StructuralConstants k = run_constants(b, m, 0.9, 0.0);
  const EnergyFunctionals fn(b, m, 0.9, k.eps);
  EnsembleSpec ens;
  ens.count = 1;
  const State w0 = generate_ensemble(ens, fn, -50.0)[0];
  bool blew = true;
  const State w1 = integ.evolve_to(w0, -50.0, 0.0, 0.01, &blew);
  CHECK_FALSE(blew);
  CHECK(fn.state_energy(0.0, w1) < fn.state_energy(-50.0, w0));
}

TEST_CASE("continuous dependence on the initial state") {
  const SpectralBasis b(3, 4);
  const Integrator integ(b, default_models(), 0.9);
  const State w0 = random_state(b, 9, 0.5);
  State w1 = w0;
  w1.u[3] += 1e-8;
  const State a = integ.evolve_to(w0, 0.0, 5.0, 0.01);
  const State c = integ.evolve_to(w1, 0.0, 5.0, 0.01);
  const double L = std::sqrt((a.u - c.u).squaredNorm() + (a.v - c.v).squaredNorm()) / 1e-8;
  CHECK(std::isfinite(L));
  CHECK(L < 1e3);
}

TEST_CASE("blow-up is flagged") {
  const SpectralBasis b(1, 2);
  Models m = free_models(1.0, 0.0);
  m.nonlin = NonlinearitySpec{400.0, 0.0, 4.0}; // strong linear gain
  const Integrator integ(b, m, 0.9);
  State w = State::zero(b.size());
  w.u[0] = 10.0;
  const TrajectoryRecord rec = integ.evolve(w, 0.0, 10.0, 0.01);
  CHECK(rec.blew_up);
  CHECK(rec.blow_up_time < 10.0);
  CHECK(rec.times.size() == rec.states.size());
}

TEST_CASE("state dump round trip") {
  const SpectralBasis b(3, 2);
  const Integrator integ(b, default_models(), 0.9);
  const TrajectoryRecord rec = integ.evolve(random_state(b, 10, 0.1), 0.0, 0.05, 0.01);
  const auto path = (std::filesystem::temp_directory_path() / "oscillon_dump_test.bin").string();
  write_state_dump(path, b, rec);
  int d = 0, M = 0;
  const TrajectoryRecord back = read_state_dump(path, &d, &M);
  std::remove(path.c_str());
  CHECK(d == 3);
  CHECK(M == 2);
  CHECK(back.alpha == 0.9);
  REQUIRE(back.states.size() == rec.states.size());
  CHECK(back.times == rec.times);
  CHECK(back.states.back().v == rec.states.back().v);
}

}
