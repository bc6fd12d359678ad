#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "vibronic/basis.hpp"
#include "vibronic/dynamics.hpp"
#include "vibronic/fock.hpp"
#include "vibronic/oracle.hpp"

using namespace vibronic;

namespace {

ModelParams dynamics_params(double mbar = 0.05)
{
  ModelParams p;
  p.omega      = 0.7;
  p.eta        = 1.0;
  p.Gamma      = 0.1;
  p.gamma      = 0.2;
  p.occupation = Occupation::mean_number(mbar);
  return p;
}

constexpr Branch kBranches[] = {Branch::Population, Branch::CoherencePlus, Branch::CoherenceMinus, Branch::Decay};

double osc_residual(FockOperator const &X, Complex lambda, oracle::SparseSuperoperator const &L, Index N)
{
  FockOperator const R = oracle::unvec(L * oracle::vec(X), N + 1) - lambda * X;
  return fock::masked_norm(R) / fock::masked_norm(X);
}

} // namespace

TEST_SUITE("basis")
{
  TEST_CASE("oscillator eigenvalues")
  {
    CHECK(osc_eigenvalue(0, 0, 1.0, 0.2) == Complex(0.0));
    CHECK(std::abs(osc_eigenvalue(1, -2, 1.0, 0.2) - Complex(-0.4, 2.0)) < 1e-15);
    CHECK(std::abs(osc_eigenvalue(0, 1, 1.0, 0.2) - Complex(-0.1, -1.0)) < 1e-15);
  }

  TEST_CASE("oscillator right elements")
  {
    Index const N = 40;
    CHECK((osc_right(0, 0, 0.05, N) - fock::thermal_state(0.05, N)).cwiseAbs().maxCoeff() < 1e-15);
    for (int n = 0; n <= 3; ++n)
      for (int l = -3; l <= 3; ++l) {
        double const expected = (n == 0 && l == 0) ? 1.0 : 0.0;
        CHECK(std::abs(osc_right(n, l, 0.05, N).trace() - expected) < 1e-10);
      }
    auto const L = oracle::build_oscillator_liouvillian(1.0, 0.2, 0.05, N, 0.0);
    CHECK(osc_residual(osc_right(1, 0, 0.05, N), Complex(-0.2), L, N) < 1e-8);
    for (int l : {-2, 1, 3}) CHECK(osc_residual(osc_right(2, l, 0.05, N), osc_eigenvalue(2, l, 1.0, 0.2), L, N) < 1e-8);
  }

  TEST_CASE("oscillator left elements and duality")
  {
    Index const N = 40;
    CHECK((osc_left(0, 0, 0.05, N) - fock::identity(N)).norm() < 1e-15);
    double worst = 0.0;
    for (int n = 0; n <= 4; ++n)
      for (int l = -4; l <= 4; ++l) {
        FockOperator const left = osc_left(n, l, 0.05, N);
        for (int n2 = 0; n2 <= 4; ++n2)
          for (int l2 = -4; l2 <= 4; ++l2) {
            Complex const v = fock::trace_product<double>(left, osc_right(n2, l2, 0.05, N));
            worst           = std::max(worst, std::abs(v - ((n == n2 && l == l2) ? 1.0 : 0.0)));
          }
      }
    CHECK(worst < 1e-8);
    CHECK((osc_left(1, 0, 0.0, 10) - fock::number(10)).norm() < 1e-14);
  }

  TEST_CASE("shifted elements satisfy the displaced eigenvalue equation")
  {
    Index const  N = 40;
    double const m = 0.05;
    auto const   d = derive(dynamics_params(m));
    auto const   L = oracle::build_oscillator_liouvillian(1.0, 0.2, m, N, 0.0);
    auto const   b = fock::annihilation(N);
    Complex const k = (2 * m + 1) * d.beta * 0.2;
    for (auto dir : {fock::ShiftDirection::Plus, fock::ShiftDirection::Minus})
      for (auto [n, l] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{1, -2}, std::pair{0, 3}}) {
        FockOperator const X    = fock::similarity_shift<double>(osc_right(n, l, m, N), d.varsigma, dir);
        double const       sign = dir == fock::ShiftDirection::Plus ? -1.0 : 1.0;
        FockOperator const R = oracle::unvec(L * oracle::vec(X), N + 1) + sign * k * (b * X - X * b) -
                               osc_eigenvalue(n, l, 1.0, 0.2) * X;
        CHECK(fock::masked_norm(R) / fock::masked_norm(X) < 1e-7);
      }
  }

  TEST_CASE("joint eigenvalues")
  {
    ModelParams p = dynamics_params();
    p.eta         = 1.5;
    p.Gamma       = 0.01;
    auto const d  = derive(p);
    CHECK(joint_eigenvalue(Branch::Population, 0, 0, d) == Complex(0.0));
    CHECK(std::abs(joint_eigenvalue(Branch::Decay, 0, 0, d) - Complex(-0.01)) < 1e-15);
    Complex const coh = joint_eigenvalue(Branch::CoherenceMinus, 0, 0, d);
    CHECK(coh.imag() == doctest::Approx(p.omega - 2.2277).epsilon(1e-4));
    CHECK(coh.real() == doctest::Approx(-0.5001 / 2).epsilon(1e-4));
    for (Branch b : kBranches)
      for (int n = 0; n <= 3; ++n)
        for (int l = -3; l <= 3; ++l) CHECK(joint_eigenvalue(b, n, l, d).real() <= 0.0);
  }

  TEST_CASE("joint elements: structure, stationary state and decay traces")
  {
    auto const   d = derive(dynamics_params());
    Index const  N = 40;
    DampingBasis basis(d, N);

    auto const &st = basis.right(Branch::Population, 0, 0);
    CHECK((st.gg - fock::thermal_state(d.m_bar, N)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(st.ee.norm() == 0.0);
    CHECK(st.ge.norm() == 0.0);

    auto const &id = basis.left(Branch::Population, 0, 0);
    CHECK((id.gg - fock::identity(N)).norm() < 1e-12);
    CHECK((id.ee - fock::identity(N)).norm() < 1e-12);

    auto const &cp = basis.right(Branch::CoherencePlus, 1, -1);
    CHECK(cp.gg.norm() == 0.0);
    CHECK(cp.ee.norm() == 0.0);
    CHECK(cp.ge.norm() + cp.eg.norm() > 0.0);

    auto const &dec = basis.right(Branch::Decay, 0, 0);
    FockOperator const dt = fock::displaced_thermal_block(d.beta, d.m_bar, N);
    CHECK((dec.ee - dt).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(dec.gg.trace() + 1.0) < 1e-9);
    CHECK(std::abs(dec.trace()) < 1e-9);
    CHECK(dec.ge.norm() == 0.0);

    // left elements grow with the Fock index, so displace on the padded space before cropping
    Index const        P  = basis.padded();
    FockOperator const D  = fock::displacement_elements(d.beta, N + 1, P + 1);
    auto const        &dl = basis.left(Branch::Decay, 1, -1);
    FockOperator const expected = D * osc_left(1, -1, d.m_bar, P) * D.adjoint();
    CHECK(fock::masked_norm(dl.ee - expected) < 1e-8);
  }

  TEST_CASE("joint residuals and duality at low order")
  {
    auto const   p = dynamics_params();
    Index const  N = 40;
    DampingBasis basis(derive(p), N);
    auto const   L = oracle::build_liouvillian(p, N);
    double       right = 0.0, left = 0.0, dual = 0.0;
    for (Branch b : kBranches)
      for (int n = 0; n <= 2; ++n)
        for (int l = -2; l <= 2; ++l) {
          auto const e = basis.entry(b, n, l);
          right        = std::max(right, (oracle::apply(L, e->right) - e->eigenvalue * e->right).masked_norm() /
                                             e->right.masked_norm());
          left = std::max(left, (oracle::apply_left(L, e->left) - e->eigenvalue * e->left).masked_norm() /
                                    e->left.masked_norm());
          for (Branch b2 : kBranches)
            for (int n2 = 0; n2 <= 2; ++n2)
              for (int l2 = -2; l2 <= 2; ++l2) {
                Complex const v = dual_pair(e->left, basis.right(b2, n2, l2));
                dual            = std::max(dual, std::abs(v - ((b == b2 && n == n2 && l == l2) ? 1.0 : 0.0)));
              }
        }
    CHECK(right < 1e-7);
    CHECK(left < 1e-7);
    CHECK(dual < 1e-7);
  }

  TEST_CASE("overlap closed forms")
  {
    auto const d0 = derive([] {
      ModelParams p = dynamics_params(0.3);
      p.eta         = 0.0;
      return p;
    }());
    for (int n = 0; n <= 2; ++n)
      for (int l = -2; l <= 2; ++l)
        for (Sign s : {Sign::Plus, Sign::Minus}) {
          double const delta = (n == 0 && l == 0) ? 1.0 : 0.0;
          CHECK(std::abs(overlap_A(n, l, s, d0) - delta) < 1e-15);
          CHECK(std::abs(overlap_B(n, l, s, d0) - delta) < 1e-15);
        }

    auto const    d  = derive(dynamics_params(0.3));
    double const  m  = d.m_bar;
    Complex const b  = d.beta, bc = std::conj(d.beta);
    Complex const A00 = std::exp(-m * ((b * b).real() + bc * bc)) * std::exp(-bc * bc) * std::exp((m + 0.5) * d.beta_abs2);
    Complex const B00 = std::exp(-kI * m * (b * b).imag()) * std::exp(-(m + 0.5) * d.beta_abs2);
    CHECK(std::abs(overlap_A(0, 0, Sign::Minus, d) - A00) < 1e-14);
    CHECK(std::abs(overlap_B(0, 0, Sign::Minus, d) - B00) < 1e-14);

    CHECK(std::abs(overlap_C(0, 0, 0, 0, d) - 1.0) < 1e-15);
    CHECK(std::abs(overlap_C(1, 0, 0, 0, d) - d.beta_abs2 / (m + 1)) < 1e-14);
    for (int k = -2; k <= 2; ++k) CHECK(overlap_C(1, 0, 2, k, d) == Complex(0.0));
  }

  TEST_CASE("overlaps against direct traces")
  {
    DampingBasis basis(derive(dynamics_params(0.3)), 40);
    auto const  &d = basis.params();
    double       ab = 0.0, c = 0.0;
    for (int n = 0; n <= 2; ++n)
      for (int l = -2; l <= 2; ++l) {
        for (Sign s : {Sign::Plus, Sign::Minus}) {
          ab = std::max(ab, std::abs(overlap_A(n, l, s, d) - basis.trace_A(n, l, s)));
          ab = std::max(ab, std::abs(overlap_B(n, l, s, d) - basis.trace_B(n, l, s)));
        }
        for (int m = 0; m <= 2; ++m)
          for (int k = -2; k <= 2; ++k) c = std::max(c, std::abs(overlap_C(n, l, m, k, d) - basis.trace_C(n, l, m, k)));
      }
    CHECK(ab < 1e-8);
    CHECK(c < 1e-8);
  }

  TEST_CASE("weights")
  {
    ModelParams p = dynamics_params(0.0);
    p.eta         = 1.5;
    p.Gamma       = 0.01;
    auto const    d = derive(p);
    Complex const z = std::conj(d.beta) * std::conj(d.beta);
    double        f = 1.0;
    for (int ell = 0; ell <= 8; ++ell) {
      if (ell > 0) f *= ell;
      Complex const expected = std::pow(z, ell) * std::exp(-z) / f;
      CHECK(std::abs(weight_W(0, -ell, d) - expected) < 1e-14);
    }
    for (int n = 0; n <= 4; ++n)
      for (int l = -4; l <= 4; ++l)
        if (n > 0 || l > 0) CHECK(std::abs(weight_W(n, l, d)) < 1e-14);

    auto const dh = derive(dynamics_params(0.25));
    for (int n = 0; n <= 3; ++n)
      for (int l = -3; l <= 3; ++l) CHECK(weight_W_emission(n, l, dh) == std::conj(weight_W(n, -l, dh)));
  }

  TEST_CASE("decay resolvent: expansion against a direct solve")
  {
    DampingBasis basis(derive(dynamics_params()), 40);
    for (auto [n, l] : {std::pair{0, 0}, std::pair{1, -1}, std::pair{2, 1}}) {
      FockOperator const solved = basis.decay_ground_by_solve(n, l);
      CHECK(fock::masked_norm(solved - basis.right(Branch::Decay, n, l).gg) < 1e-8);
    }
  }

  TEST_CASE("resonant decay denominator is reported")
  {
    ModelParams p = dynamics_params();
    p.Gamma       = p.gamma;
    DampingBasis basis(derive(p), 30);
    try {
      basis.entry(Branch::Decay, 0, 0);
      FAIL("expected ResonanceError");
    } catch (ResonanceError const &e) {
      CHECK(e.n == 1);
      CHECK(e.l == 0);
    }
    CHECK_NOTHROW(basis.entry(Branch::CoherenceMinus, 0, 0));
  }

  TEST_CASE("truncated reconstruction converges")
  {
    auto const   p = dynamics_params();
    Index const  N = 30;
    DampingBasis basis(derive(p), N);
    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    // random low-lying operator, smoothed by a thermal envelope so the expansion converges
    JointOperator X = JointOperator::zero(N);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        for (Index i = 0; i < 3; ++i)
          for (Index j = 0; j < 3; ++j) X.block(r, c)(i, j) = Complex(g(rng), g(rng));
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) X.block(r, c) = X.block(r, c) * fock::thermal_state(0.05, N);
    X *= 1.0 / X.trace();

    // the non-normal basis overshoots at the smallest boxes; from k = 4 on the error falls
    double prev = 1e300;
    for (int k : {4, 6, 8, 10, 12}) {
      auto const   c   = expand(X, basis, {k, k});
      double const err = (evolve_expansion(c, basis, 0.0) - X).masked_norm();
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 0.1);
  }

  TEST_CASE("concurrent catalogue access")
  {
    DampingBasis basis(derive(dynamics_params()), 20);
    std::vector<std::thread> workers;
    std::vector<Complex>     traces(8);
    for (int w = 0; w < 8; ++w)
      workers.emplace_back([&, w] { traces[w] = basis.right(Branch::CoherenceMinus, w % 2, w % 3 - 1).ge.trace(); });
    for (auto &t : workers) t.join();
    for (int w = 0; w < 8; ++w) CHECK(traces[w] == basis.right(Branch::CoherenceMinus, w % 2, w % 3 - 1).ge.trace());
  }
}
