#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "oscillon/fracop.hpp"
#include "oscillon/random.hpp"

using namespace oscillon;
using doctest::Approx;

TEST_SUITE("fracop") {

TEST_CASE("closed-form blocks") {
  const MuModel two = MuModel::constant(2.0);
  const Block2 b = lambda_block(0.0, 1.0, 3.0, two).m;
  CHECK(b(0, 0) == 0.0);
  CHECK(b(0, 1) == -1.0);
  CHECK(b(1, 0) == 6.0);
  CHECK(b(1, 1) == 0.0);

  const Block2 inv = lambda_inverse_block(0.0, 1.0, 3.0, two).m;
  CHECK(inv(0, 1) == Approx(1.0 / 6.0));
  CHECK(inv(1, 0) == -1.0);
  CHECK(inv(0, 0) == 0.0);

  const Block2 rot = lambda_block(0.0, 0.5, 1.0, MuModel::constant(1.0)).m;
  const double c = std::sqrt(0.5);
  CHECK(rot(0, 0) == Approx(c));
  CHECK(rot(0, 1) == Approx(-c));
  CHECK(rot(1, 0) == Approx(c));
  CHECK(rot(1, 1) == Approx(c));

  const Block2 near = lambda_inverse_block(0.0, 0.999, 4.0, MuModel::constant(1.0)).m;
  CHECK(std::abs(near(0, 0)) < 5e-3);
  CHECK(std::abs(near(0, 1) - 0.25) < 5e-3);
  CHECK(std::abs(near(1, 0) + 1.0) < 5e-3);

  CHECK_THROWS_AS(lambda_block(0.0, 0.0, 1.0, two), std::invalid_argument);
  CHECK_THROWS_AS(lambda_block(0.0, 1.5, 1.0, two), std::invalid_argument);
  CHECK_THROWS_AS(lambda_block(0.0, 0.5, 0.0, two), std::invalid_argument);
}

TEST_CASE("block eigenvalues") {
  const Block2 b = lambda_block(0.0, 0.5, 16.0, MuModel::constant(4.0)).m;
  Eigen::EigenSolver<Block2> es(b);
  for (int i = 0; i < 2; ++i) {
    CHECK(es.eigenvalues()[i].real() == Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(es.eigenvalues()[i].imag()) == Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("spectrum closed form") {
  const auto [p, m] = spectrum(0.0, 1.0, 3.0, MuModel::constant(2.0));
  CHECK(std::abs(p.real()) < 1e-15);
  CHECK(p.imag() == Approx(std::sqrt(6.0)).epsilon(1e-14));
  CHECK(m == std::conj(p));

  const auto [q, r] = spectrum(0.0, 0.5, 1.0, MuModel::constant(1.0));
  CHECK(q.real() == Approx(-std::sqrt(0.5)).epsilon(1e-14));
  CHECK(q.imag() == Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(r.imag() == Approx(-std::sqrt(0.5)).epsilon(1e-14));
}

TEST_CASE("random identities") {
  const MuModel mu = MuModel::logistic_rise(1.0, 2.0, 0.05);
  CounterRng rng(7, 0);
  for (int i = 0; i < 100; ++i) {
    const double alpha = 0.01 + 0.99 * rng.next_uniform();
    const double t = -100.0 + 200.0 * rng.next_uniform();
    const double nu = 1.0 + 200.0 * rng.next_uniform();
    const Block2 b = lambda_block(t, alpha, nu, mu).m;
    const Block2 bi = lambda_inverse_block(t, alpha, nu, mu).m;
    CHECK((b * bi - Block2::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(b(0, 0) == b(1, 1));
    const double m = eval_mu(mu, t);
    CHECK(b.determinant() == Approx(std::pow(m * nu, alpha)).epsilon(1e-12));
    CHECK(b.trace() >= 0.0);

    Eigen::EigenSolver<Block2> es(b);
    const auto [p, q] = spectrum(t, alpha, nu, mu);
    const double scale = std::abs(p);
    const auto e0 = -es.eigenvalues()[0];
    const auto e1 = -es.eigenvalues()[1];
    const double err = std::min(std::abs(e0 - p) + std::abs(e1 - q), std::abs(e0 - q) + std::abs(e1 - p));
    CHECK(err / scale < 1e-10);
    CHECK(p.real() < 0.0);
  }
}

TEST_CASE("balakrishnan quadrature") {
  const MuModel one = MuModel::constant(1.0);
  const QuadratureResult r = balakrishnan_block(0.0, 0.5, 1.0, one, 1e-8);
  CHECK(r.converged);
  CHECK((r.block.m - lambda_inverse_block(0.0, 0.5, 1.0, one).m).cwiseAbs().maxCoeff() < 1e-6);

  const MuModel two = MuModel::constant(2.0);
  for (double a : {0.25, 0.75}) {
    const QuadratureResult q = balakrishnan_block(0.0, a, 3.0, two, 1e-8);
    CHECK((q.block.m - lambda_inverse_block(0.0, a, 3.0, two).m).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(q.block.m(0, 0) - q.block.m(1, 1)) < 1e-8);
  }
  CHECK_THROWS_AS(balakrishnan_block(0.0, 1.0, 3.0, two, 1e-8), std::invalid_argument);
}

TEST_CASE("alpha limit report") {
  const SpectralBasis b(3, 4);
  const MuModel mu = MuModel::logistic_rise(1.0, 2.0, 0.01);
  Field u(static_cast<Eigen::Index>(b.size()));
  for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = std::pow(b.eigenvalues()[k], -2.0);
  const Field v = 0.5 * u;
  const auto rows = alpha_limit_report(0.0, u, v, mu, b, {0.9, 0.99, 0.999, 1.0});
  REQUIRE(rows.size() == 4);
  for (int i = 0; i + 1 < 3; ++i) {
    CHECK(rows[i + 1].inverse_error < rows[i].inverse_error);
    CHECK(rows[i + 1].action_error < rows[i].action_error);
  }
  CHECK(rows[3].inverse_error == 0.0);
  CHECK(rows[3].action_error == 0.0);
  CHECK(rows[0].inverse_argmax_nu == b.nu_min());
  CHECK_THROWS(alpha_limit_report(0.0, u, v, mu, b, {}));
}

TEST_CASE("time Hoelder estimate") {
  const SpectralBasis b(3, 4);
  const MuModel mu = MuModel::logistic_rise(1.0, 2.0, 0.01);
  CHECK(hoelder_operator_estimate(1.0, 1.0, 0.0, 0.9, mu, b).lhs == 0.0);
  CHECK(hoelder_operator_estimate(0.0, 5.0, 0.0, 0.9, MuModel::constant(1.5), b).lhs == 0.0);
  const HolderEstimate e = hoelder_operator_estimate(0.0, 1.0, 0.0, 0.9, mu, b);
  CHECK(e.lhs > 0.0);
  CHECK(e.holds);
  CHECK(e.lhs <= e.bound);
}

TEST_CASE("weighted operator norm") {
  const Block2 g = yt_metric_sqrt(2.0, 3.0);
  CHECK(weighted_spectral_norm(Block2::Identity(), g) == Approx(1.0));
  CHECK(weighted_spectral_norm(Block2::Identity() * 3.0, g) == Approx(3.0));
}

}
