#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "vibronic/basis.hpp"
#include "vibronic/fock.hpp"
#include "vibronic/oracle.hpp"
#include "vibronic/spectra.hpp"

using namespace vibronic;

namespace {

ModelParams fig2(double mbar = 0.05)
{
  ModelParams p;
  p.eta        = 1.0;
  p.Gamma      = 0.1;
  p.gamma      = 0.2;
  p.occupation = Occupation::mean_number(mbar);
  return p;
}

JointOperator stationary(double mbar, Index N)
{
  Eigen::Matrix2cd g = Eigen::Matrix2cd::Zero();
  g(0, 0)            = 1.0;
  return JointOperator::product(g, fock::thermal_state(mbar, N));
}

double max_abs(JointOperator const &X)
{
  return std::max({X.gg.cwiseAbs().maxCoeff(), X.ge.cwiseAbs().maxCoeff(), X.eg.cwiseAbs().maxCoeff(),
                   X.ee.cwiseAbs().maxCoeff()});
}

} // namespace

TEST_SUITE("oracle")
{
  TEST_CASE("vectorization kernels act like the matrix products")
  {
    std::mt19937                     rng(11);
    std::normal_distribution<double> g;
    auto random = [&](Index n) {
      CMatrix M(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) M(i, j) = Complex(g(rng), g(rng));
      return M;
    };
    Index const   n = 7;
    CMatrix const A = random(n), B = random(n), X = random(n);
    CHECK((oracle::unvec(oracle::vec(X), n) - X).norm() == 0.0);
    CHECK((oracle::unvec(oracle::left_multiply(A) * oracle::vec(X), n) - A * X).norm() < 1e-12);
    CHECK((oracle::unvec(oracle::right_multiply(B) * oracle::vec(X), n) - X * B).norm() < 1e-12);
    CHECK((oracle::unvec(oracle::sandwich(A, B) * oracle::vec(X), n) - A * X * B).norm() < 1e-12);
    CMatrix const comm = -kI * (A * X - X * A);
    CHECK((oracle::unvec(oracle::commutator_generator(A) * oracle::vec(X), n) - comm).norm() < 1e-12);
    CMatrix const dis = 2.0 * A * X * A.adjoint() - A.adjoint() * A * X - X * A.adjoint() * A;
    CHECK((oracle::unvec(oracle::dissipator(A) * oracle::vec(X), n) - dis).norm() < 1e-11);
    CHECK(oracle::vec(X)(1) == X(1, 0)); // column stacking
  }

  TEST_CASE("generator: trace preservation and stationary state")
  {
    for (double m : {0.05, 1.0}) {
      ModelParams p = fig2(m);
      p.Gamma_star  = 0.03;
      Index const N = 30;
      auto const  L = oracle::build_liouvillian(p, N);
      CHECK(oracle::trace_preservation_residual(L, 2 * (N + 1)) < 1e-12);
      CHECK(max_abs(oracle::apply(L, stationary(m, N))) < 1e-10);
    }
    CHECK_THROWS(oracle::build_liouvillian(fig2(), oracle::kMaxCutoff + 1));
  }

  TEST_CASE("steady state")
  {
    Index const N  = 30;
    auto const  st = oracle::steady_state(oracle::build_liouvillian(fig2(), N), N);
    CHECK(max_abs(st - stationary(0.05, N)) < 1e-9);
    CHECK(std::abs(st.trace() - 1.0) < 1e-15);

    ModelParams strong = fig2(1.0);
    strong.eta         = 3.0;
    auto const st2     = oracle::steady_state(oracle::build_liouvillian(strong, N), N);
    CHECK(max_abs(st2 - stationary(1.0, N)) < 1e-9);
  }

  TEST_CASE("decoupled excited population decays at Gamma")
  {
    ModelParams p = fig2();
    p.eta         = 0.0;
    Index const N = 10;
    auto const  L = oracle::build_liouvillian(p, N);
    Eigen::Matrix2cd e = Eigen::Matrix2cd::Zero();
    e(1, 1)            = 1.0;
    auto const res     = oracle::propagate(L, JointOperator::product(e, fock::thermal_state(0.05, N)), {0.0, 1.0, 5.0, 20.0});
    for (std::size_t i = 0; i < res.times.size(); ++i)
      CHECK(std::abs(res.states[i].ee.trace().real() - std::exp(-0.1 * res.times[i])) < 1e-10);
  }

  TEST_CASE("dense diagonalization of an exactly solvable truncation")
  {
    // eta = 0 and mbar = 0: the truncated generator is triangular and its spectrum is exact
    ModelParams p = fig2(0.0);
    p.eta         = 0.0;
    p.omega       = 0.4;
    Index const N = 5;
    CMatrix const dense = CMatrix(oracle::build_liouvillian(p, N));
    Eigen::ComplexEigenSolver<CMatrix> es(dense, false);
    auto const  d  = derive(p);
    auto nearest = [&](Complex z) { return (es.eigenvalues().array() - z).abs().minCoeff(); };
    for (Branch b : {Branch::Population, Branch::CoherencePlus, Branch::CoherenceMinus, Branch::Decay})
      for (int n = 0; n <= 2; ++n)
        for (int l = -2; l <= 2; ++l)
          if (n + std::abs(l) <= N) CHECK(nearest(joint_eigenvalue(b, n, l, d)) < 1e-9);
  }

  TEST_CASE("eigenvalue cross-check on random parameter sets")
  {
    std::mt19937                           rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Index const                            N = 40;
    for (int set = 0; set < 5; ++set) {
      ModelParams p;
      p.omega      = -1.0 + 2.0 * u(rng);
      p.eta        = 0.3 + 0.8 * u(rng);
      p.Gamma      = 0.05 + 0.1 * u(rng);
      p.gamma      = 0.1 + 0.2 * u(rng);
      p.occupation = Occupation::mean_number(0.25 * u(rng));
      auto const d = derive(p);
      auto const L = oracle::build_liouvillian(p, N);
      double     worst = 0.0;
      for (Branch b : {Branch::Population, Branch::CoherencePlus, Branch::CoherenceMinus, Branch::Decay})
        for (int n = 0; n <= 2; ++n)
          for (int l = -2; l <= 2; ++l) {
            Complex const lam = joint_eigenvalue(b, n, l, d);
            auto const    ev  = oracle::eigenvalues_near(L, lam + Complex(1e-3, 1e-3), 1);
            worst             = std::max(worst, std::abs(ev.front() - lam));
          }
      CHECK(worst < 1e-7);
    }
  }

  TEST_CASE("propagation: methods agree, state stays physical, long-time limit")
  {
    ModelParams const p  = fig2();
    Index const       N  = 20;
    auto const        L  = oracle::build_liouvillian(p, N);
    auto const        th = fock::thermal_state(0.05, N);
    Eigen::Matrix2cd  r;
    r << 0.5, 0.5, 0.5, 0.5;
    JointOperator const rho0 = JointOperator::product(r, th);

    std::vector<double> times;
    for (int i = 0; i <= 12; ++i) times.push_back(0.5 * i);
    auto const taylor = oracle::propagate(L, rho0, times, oracle::Propagator::Taylor);
    auto const dp     = oracle::propagate(L, rho0, times, oracle::Propagator::DormandPrince, 1e-11);
    CHECK(max_abs(taylor.states.front() - rho0) == 0.0);
    double gap = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      gap            = std::max(gap, max_abs(taylor.states[i] - dp.states[i]));
      auto const hyg = oracle::hygiene(taylor.states[i]);
      CHECK(hyg.hermiticity < 1e-10);
      CHECK(hyg.trace_error < 1e-10);
      CHECK(hyg.min_eigenvalue > -1e-8);
    }
    CHECK(gap < 1e-8);

    auto const late = oracle::propagate(L, rho0, {50.0 / p.Gamma});
    CHECK((late.states.back() - stationary(0.05, N)).norm() < 1e-8);
    CHECK_THROWS(oracle::propagate(L, rho0, {1.0, 0.5}));
  }

  TEST_CASE("decoupled absorption is the two-level Lorentzian")
  {
    ModelParams p = fig2();
    p.eta         = 0.0;
    p.omega       = 0.3;
    std::vector<double> const off = linear_grid(-1.0, 1.0, 41);
    auto const                o   = oracle::correlation_spectrum(SpectrumKind::Absorption, off, p, 8);
    auto const                a   = absorption(off, derive(p));
    for (std::size_t i = 0; i < off.size(); ++i) {
      double const lor = 0.5 * p.Gamma / (off[i] * off[i] + 0.25 * p.Gamma * p.Gamma);
      CHECK(std::abs(o[i] - lor) < 1e-10);
      CHECK(std::abs(a.total[i] - lor) < 1e-10);
    }
  }

  TEST_CASE("oracle emission mirrors oracle absorption")
  {
    ModelParams const p = fig2();
    auto const        d = derive(p);
    double const      z = d.omega_tilde - p.omega;
    std::vector<double> off, mirrored;
    for (double x : {-2.0, -1.3, -1.0, -0.5, 0.0, 0.4}) {
      off.push_back(z + x);
      mirrored.push_back(z - x);
    }
    Index const N = 30;
    auto const  e = oracle::correlation_spectrum(SpectrumKind::Emission, off, p, N);
    auto const  a = oracle::correlation_spectrum(SpectrumKind::Absorption, mirrored, p, N);
    for (std::size_t i = 0; i < off.size(); ++i) CHECK(std::abs(p.Gamma * e[i] - a[i]) < 1e-6);
  }

  TEST_CASE("resolvent agrees with time integration of the correlation")
  {
    ModelParams const p = fig2();
    Index const       N = 20;
    auto const        L = oracle::build_liouvillian(p, N);
    // G(t) = Tr[sigma_+ e^{Lt} rho_st sigma_-], carried by the ge block
    JointOperator x = JointOperator::zero(N);
    x.ge            = fock::thermal_state(0.05, N);
    double const         h = 0.02;
    int const            steps = 7000; // e^{-Gamma_tilde t / 2} ~ 1e-10 at the end
    std::vector<double>  times;
    std::vector<Complex> G{x.ge.trace()};
    for (int i = 0; i <= steps; ++i) times.push_back(i * h);
    std::vector<double> segment;
    for (int i = 0; i <= 200; ++i) segment.push_back(i * h);
    JointOperator state = x;
    while (G.size() < times.size()) {
      auto const run = oracle::propagate(L, state, segment);
      for (std::size_t i = 1; i < run.states.size() && G.size() < times.size(); ++i) G.push_back(run.states[i].ge.trace());
      state = run.states.back();
    }

    std::vector<double> const w{-1.0, p.omega + derive(p).zpl_shift(), 0.5};
    auto const                res = oracle::correlation_spectrum(SpectrumKind::Absorption, w, p, N);
    for (std::size_t k = 0; k < w.size(); ++k) {
      // Simpson's rule on int_0^T G(t) e^{-i w t} dt
      Complex acc = 0.0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        double const c = (i == 0 || i + 1 == times.size()) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += c * G[i] * std::exp(-kI * (p.omega + w[k]) * times[i]);
      }
      CHECK(std::abs((acc * h / 3.0).real() - res[k]) < 1e-6);
    }
  }
}
