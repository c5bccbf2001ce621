#include <doctest.h>

#include <cmath>

#include "oscillon/coeffs.hpp"

using namespace oscillon;
using doctest::Approx;

TEST_SUITE("coeffs") {

TEST_CASE("model evaluation") {
  CHECK(eval_mu(MuModel::logistic_rise(1.0, 2.0, 0.3), 0.0) == 1.5);
  CHECK(eval_omega(OmegaModel::constant(2.0), -7.0) == 2.0);
  CHECK(eval_omega(OmegaModel::constant(2.0), 1e3) == 2.0);

  const OmegaModel om = OmegaModel::logistic_decay(0.5, 2.0, 0.1);
  CHECK(eval_omega(om, -1e3) == Approx(2.0).epsilon(1e-14));
  CHECK(omega_sup(om) == 2.0);
  CHECK(eval_omega_prime(om, 3.0) < 0.0);

  const MuModel mu = MuModel::logistic_rise(1.0, 2.0, 0.05);
  for (double t : {-40.0, 0.0, 25.0}) {
    const double fd = (eval_mu(mu, t + 1e-5) - eval_mu(mu, t - 1e-5)) / 2e-5;
    CHECK(eval_mu_prime(mu, t) == Approx(fd).epsilon(1e-8));
    CHECK(eval_mu(mu, t) >= 1.0);
    CHECK(eval_mu(mu, t) <= 2.0);
  }
}

TEST_CASE("table model interpolates and clamps") {
  MuModel mu;
  mu.kind = MuModel::Kind::Table;
  mu.table = {{0.0, 1.0, 3.0}, {1.0, 2.0, 4.0}};
  CHECK(eval_mu(mu, -5.0) == 1.0);
  CHECK(eval_mu(mu, 0.5) == 1.5);
  CHECK(eval_mu(mu, 2.0) == 3.0);
  CHECK(eval_mu(mu, 9.0) == 4.0);
  CHECK(eval_mu_prime(mu, 2.0) == 1.0);
  CHECK(mu_lower(mu) == 1.0);
  CHECK(mu_upper(mu) == 4.0);
}

TEST_CASE("decay rate") {
  StructuralConstants k;
  k.c1 = 1.0;
  k.W = 2.0;
  k.d0 = k.d1 = 1.0;
  CHECK(decay_rate(OmegaModel::constant(2.0), k, 0.0) == 0.0625);

  StructuralConstants big;
  big.c1 = 1e3;
  big.W = 0.0;
  big.d0 = 10.0;
  big.d1 = 1.0;
  CHECK(decay_rate(OmegaModel::constant(5.0), big, 0.0) == 1.0);

  // eps <= omega/4 and <= 1, nonincreasing in t
  const OmegaModel om = OmegaModel::logistic_decay(0.5, 2.0, 0.1);
  const SpectralBasis b(3, 4);
  const StructuralConstants kk = compute_constants(om, MuModel::constant(1.0), 0.9, b, 0.0, 0.0);
  double prev = 1.0;
  for (double t = -50.0; t <= 50.0; t += 5.0) {
    const double e = decay_rate(om, kk, t);
    CHECK(e <= eval_omega(om, t) / 4.0);
    CHECK(e <= 1.0);
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("structural constants on a unit basis") {
  const SpectralBasis b(1, 4); // nu_min = 1, every d_i = 1
  const OmegaModel om = OmegaModel::constant(2.0);
  const MuModel mu = MuModel::constant(1.0);
  const StructuralConstants k = compute_constants(om, mu, 0.7, b, 0.0, 0.0);
  CHECK(k.d0 == 1.0);
  CHECK(k.d5 == 1.0);
  CHECK(k.c1 == 1.0);
  CHECK(k.c2 == 7.0);
  CHECK(k.C1 == 1.0);
  CHECK(k.C2 == 4.0);
  CHECK(k.M0 == 7.0);
  CHECK(k.M1 == 0.0);
  CHECK(k.R_absorb == 1.0);

  const StructuralConstants k1 = compute_constants(om, mu, 0.7, b, 1.0, 0.0);
  CHECK(k1.M1 == 20.0);
  CHECK(k1.R_absorb == 41.0);
  CHECK(k1.D3 > k.D3);

  CHECK(compute_constants(OmegaModel::constant(1.0), mu, 0.7, b, 0.0, 0.0).c1 == 0.5);
  CHECK_THROWS_AS(compute_constants(om, mu, 0.0, b, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_constants(om, mu, 1.2, b, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("assumption checker") {
  const SpectralBasis b(3, 4);
  const OmegaModel om = OmegaModel::logistic_decay(0.5, 2.0, 0.1);
  const std::vector<double> grid = uniform_grid(-250.0, 50.0, 601);

  const MuModel mild = MuModel::logistic_rise(1.0, 2.0, 1e-3);
  const AssumptionReport ok = check_assumptions(om, mild, 0.9, b, grid);
  CHECK(ok.all_pass());

  const AssumptionReport steep = check_assumptions(om, MuModel::logistic_rise(1.0, 2.0, 10.0), 0.9, b, grid);
  REQUIRE(steep.find("mu_envelope") != nullptr);
  CHECK_FALSE(steep.find("mu_envelope")->pass);

  const OmegaModel rising = OmegaModel::logistic_decay(2.0, 0.5, 0.1);
  const AssumptionReport bad = check_assumptions(rising, mild, 0.9, b, grid);
  CHECK_FALSE(bad.find("omega_nonincreasing")->pass);

  OmegaModel loose = om;
  loose.holder.constant = 1e-4;
  CHECK_FALSE(check_assumptions(loose, mild, 0.9, b, grid).find("omega_holder")->pass);
}

TEST_CASE("largest admissible mu steepness") {
  const SpectralBasis b(3, 4);
  const OmegaModel om = OmegaModel::logistic_decay(0.5, 2.0, 0.1);
  const std::vector<double> grid = uniform_grid(-250.0, 50.0, 601);
  const double d = max_admissible_mu_steepness(om, MuModel::logistic_rise(1.0, 2.0, 0.0), 0.9, b, grid);
  CHECK(d > 0.0);
  CHECK(check_assumptions(om, MuModel::logistic_rise(1.0, 2.0, d), 0.9, b, grid).all_pass());
  CHECK_FALSE(check_assumptions(om, MuModel::logistic_rise(1.0, 2.0, d * 1.01), 0.9, b, grid).all_pass());
}

TEST_CASE("mu power is quarter-Hoelder with the closed-form constant") {
  const MuModel mu = MuModel::logistic_rise(1.0, 2.0, 0.01);
  const double C = mu_power_holder_quarter(mu, 0.45);
  for (double t : {-30.0, -1.0, 0.0, 2.5, 40.0})
    for (double dt : {1e-3, 0.1, 1.0, 10.0, 100.0}) {
      const double lhs = std::abs(std::pow(eval_mu(mu, t + dt), 0.45) - std::pow(eval_mu(mu, t), 0.45));
      CHECK(lhs <= C * std::pow(dt, 0.25) * (1.0 + 1e-12));
    }
}

}
