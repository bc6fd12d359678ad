#include <doctest.h>

#include <cmath>
#include <random>

#include "vibronic/model.hpp"

using namespace vibronic;

namespace {

ModelParams params(double eta, double Gamma, double gamma, double mbar)
{
  ModelParams p;
  p.eta        = eta;
  p.Gamma      = Gamma;
  p.gamma      = gamma;
  p.occupation = Occupation::mean_number(mbar);
  return p;
}

} // namespace

TEST_SUITE("model")
{
  TEST_CASE("mean occupation")
  {
    CHECK(mean_occupation(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean_occupation(std::log(21.0 / 20.0)) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(mean_occupation(50.0) < 1e-21);
    CHECK_THROWS_AS(mean_occupation(0.0), InvalidParams);
    CHECK_THROWS_AS(mean_occupation(-1.0), InvalidParams);
    CHECK(Occupation::temperature_ratio(std::log(2.0)).m_bar() == doctest::Approx(1.0));
  }

  TEST_CASE("decoupled limit")
  {
    ModelParams p = params(0.0, 0.1, 0.2, 0.3);
    p.omega       = 2.5;
    auto const d  = derive(p);
    CHECK(d.beta == Complex(0.0));
    CHECK(d.omega_tilde == 2.5);
    CHECK(d.Gamma_tilde == doctest::Approx(0.1));
    CHECK(d.huang_rhys == 0.0);
  }

  TEST_CASE("dynamics parameter set")
  {
    auto const d = derive(params(1.0, 0.1, 0.2, 0.05));
    CHECK(d.beta.real() == doctest::Approx(-0.990099).epsilon(1e-6));
    CHECK(d.beta.imag() == doctest::Approx(-0.099010).epsilon(1e-5));
    CHECK(d.beta_abs2 == doctest::Approx(0.990099).epsilon(1e-6));
    CHECK(d.Gamma_tilde == doctest::Approx(0.317822).epsilon(1e-6));
  }

  TEST_CASE("spectrum parameter set")
  {
    auto const d = derive(params(1.5, 0.01, 0.2, 0.05));
    CHECK(d.beta_abs2 == doctest::Approx(2.25 / 1.01).epsilon(1e-14));
    CHECK(d.zpl_shift() == doctest::Approx(-2.2277).epsilon(1e-4));
    CHECK(d.Gamma_tilde == doctest::Approx(0.5001).epsilon(1e-4));
  }

  TEST_CASE("derived identities over random draws")
  {
    std::mt19937                           rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
      ModelParams p;
      p.omega      = -5.0 + 10.0 * u(rng);
      p.nu         = 0.2 + 2.0 * u(rng);
      p.eta        = -3.0 + 6.0 * u(rng);
      p.Gamma      = u(rng);
      p.gamma      = 0.01 + u(rng);
      p.occupation = Occupation::mean_number(3.0 * u(rng));
      p.Gamma_star = 0.5 * u(rng);
      auto const    d = derive(p);
      double const  m = d.m_bar;
      Complex const b = d.beta, bc = std::conj(d.beta);
      CHECK(std::abs(d.beta - (-p.eta / Complex(p.nu, -0.5 * p.gamma))) < 1e-14);
      CHECK(d.beta_abs2 == doctest::Approx(p.eta * p.eta / (p.nu * p.nu + 0.25 * p.gamma * p.gamma)).epsilon(1e-13));
      CHECK(d.omega_tilde == doctest::Approx(p.omega - d.beta_abs2 * p.nu).epsilon(1e-13));
      CHECK(d.Gamma_tilde ==
            doctest::Approx(p.Gamma + d.beta_abs2 * p.gamma * (2 * m + 1) + p.Gamma_star).epsilon(1e-13));
      CHECK(std::abs(d.alpha_plus - (b * (m + 1) - bc * m)) < 1e-13);
      CHECK(std::abs(d.beta_plus - (b - bc) * (m + 1)) < 1e-13);
      CHECK(std::abs(d.alpha_minus - (bc - b) * m) < 1e-13);
      CHECK(std::abs(d.beta_minus - (bc * (m + 1) - b * m)) < 1e-13);
      CHECK(std::abs(d.varsigma - (bc - b) * (2 * m + 1)) < 1e-13);
      CHECK(std::abs(d.varsigma.real()) < 1e-15);
    }
  }

  TEST_CASE("zero-temperature symmetries and the gamma -> 0 limit")
  {
    auto const d = derive(params(1.2, 0.1, 0.3, 0.0));
    CHECK(std::abs(d.alpha_minus) == 0.0);
    CHECK(std::abs(d.beta_minus - std::conj(d.beta)) < 1e-15);
    auto const slow = derive(params(1.2, 0.1, 1e-6, 0.0));
    CHECK(slow.beta_abs2 == doctest::Approx(slow.huang_rhys).epsilon(1e-11));
  }

  TEST_CASE("Gamma_tilde increases with mbar and Gamma_star")
  {
    double prev = -1.0;
    for (double m : {0.0, 0.1, 0.5, 1.0, 4.0}) {
      double const g = derive(params(0.8, 0.1, 0.2, m)).Gamma_tilde;
      CHECK(g > prev);
      prev = g;
    }
    ModelParams p = params(0.8, 0.1, 0.2, 0.2);
    prev          = -1.0;
    for (double gs : {0.0, 0.05, 0.3}) {
      p.Gamma_star   = gs;
      double const g = derive(p).Gamma_tilde;
      CHECK(g > prev);
      prev = g;
    }
  }

  TEST_CASE("validation")
  {
    CHECK(validate(params(1.5, 0.01, 0.2, 0.05)).has("resolved-sidebands"));
    CHECK(validate(params(1.5, 0.01, 0.2, 0.05)).ok());

    auto const zero = validate(params(1.0, 0.1, 0.0, 0.0));
    CHECK_FALSE(zero.ok());
    CHECK(zero.has("gamma-zero"));
    CHECK_THROWS_AS(derive(params(1.0, 0.1, 0.0, 0.0)), InvalidParams);

    auto const hot = validate(params(1.5, 0.01, 0.2, 1.0));
    CHECK(hot.ok());
    CHECK(hot.has("overlapping-sidebands"));

    ModelParams bad = params(1.0, -0.1, 0.2, 0.0);
    CHECK(validate(bad).has("invalid-Gamma"));
    bad = params(1.0, 0.1, 0.2, -1.0);
    CHECK(validate(bad).has("invalid-occupation"));
    bad    = params(1.0, 0.1, 0.2, 0.0);
    bad.nu = 0.0;
    CHECK(validate(bad).has("invalid-nu"));
    bad     = params(1.0, 0.1, 0.2, 0.0);
    bad.eta = std::nan("");
    CHECK(validate(bad).has("non-finite"));
  }
}
