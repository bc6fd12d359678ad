#include "vibronic/basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/SparseLU>

#include "vibronic/fock.hpp"
#include "vibronic/oracle.hpp"
#include "vibronic/special.hpp"

namespace vibronic {

using special::binomial;
using special::factorial;
using special::ipow;

std::string to_string(Branch b)
{
  switch (b) {
  case Branch::Population: return "pop0";
  case Branch::CoherencePlus: return "coh+";
  case Branch::CoherenceMinus: return "coh-";
  case Branch::Decay: return "decay";
  }
  return "?";
}

Branch branch_from_string(std::string const &s)
{
  if (s == "pop0") return Branch::Population;
  if (s == "coh+") return Branch::CoherencePlus;
  if (s == "coh-") return Branch::CoherenceMinus;
  if (s == "decay") return Branch::Decay;
  throw std::invalid_argument("unknown branch '" + s + "'");
}

namespace {

// j! / (j-a)!
double falling(int j, int a)
{
  double r = 1.0;
  for (int i = 0; i < a; ++i) r *= double(j - i);
  return r;
}

// sqrt((j+k)! / j!)
double sqrt_rising(int j, int k)
{
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= std::sqrt(double(j + i));
  return r;
}

// Place diag_j on the l-th off-diagonal: (j+l, j) for l >= 0 via b†^l diag,
// or (j, j+|l|) via diag b^|l|.
FockOperator banded(std::vector<double> const &diag, int lower, int upper, double pref, Index N)
{
  FockOperator X = FockOperator::Zero(N + 1, N + 1);
  for (int j = 0; j <= N; ++j) {
    if (j + lower > N || j + upper > N) break;
    if (lower > 0)
      X(j + lower, j) = pref * sqrt_rising(j, lower) * diag[std::size_t(j)];
    else
      X(j, j + upper) = pref * diag[std::size_t(j)] * sqrt_rising(j, upper);
  }
  return X;
}

// |beta|^E * u^j with u = beta/|beta| (or its conjugate), times exp(log_coef).
Complex beta_monomial(DerivedParams const &d, double log_coef, int E, int j, bool conjugate)
{
  if (d.beta_abs2 == 0.0) return E == 0 ? Complex(std::exp(log_coef)) : Complex(0.0);
  Complex u = d.beta / std::sqrt(d.beta_abs2);
  if (conjugate) u = std::conj(u);
  return std::exp(log_coef + 0.5 * E * std::log(d.beta_abs2)) * ipow(u, j);
}

double lfac(int n) { return std::lgamma(double(n) + 1.0); }

} // namespace

FockOperator osc_right(int n, int l, double mbar, Index N)
{
  fock::check_cutoff(N);
  if (n < 0) throw std::invalid_argument("osc_right: n must be non-negative");
  int const    p = std::abs(l);
  double const s = mbar / (mbar + 1.0);
  auto const   c = special::laguerre_coefficients<double>(n, p);
  std::vector<double> diag(std::size_t(N) + 1);
  for (int j = 0; j <= N; ++j) {
    double tot = 0.0;
    for (int a = 0; a <= std::min(n, j); ++a)
      tot += c[std::size_t(a)] / ipow(mbar + 1.0, a) * falling(j, a) * ipow(s, j - a);
    diag[std::size_t(j)] = tot;
  }
  double const pref = (n % 2 == 0 ? 1.0 : -1.0) / ipow(mbar + 1.0, p + 1);
  return l >= 0 ? banded(diag, l, 0, pref, N) : banded(diag, 0, p, pref, N);
}

FockOperator osc_left(int n, int l, double mbar, Index N)
{
  fock::check_cutoff(N);
  if (n < 0) throw std::invalid_argument("osc_left: n must be non-negative");
  int const p = std::abs(l);
  std::vector<double> diag(std::size_t(N) + 1);
  for (int j = 0; j <= N; ++j) {
    double tot = 0.0;
    for (int a = 0; a <= std::min(n, j); ++a) {
      double const sign = (a + n) % 2 == 0 ? 1.0 : -1.0;
      tot += sign * binomial<double>(n + p, n - a) * ipow(mbar, n - a) / factorial<double>(a) * falling(j, a);
    }
    diag[std::size_t(j)] = tot;
  }
  double const pref = ipow(1.0 / (mbar + 1.0), n) * factorial<double>(n) / factorial<double>(n + p);
  return l >= 0 ? banded(diag, 0, l, pref, N) : banded(diag, p, 0, pref, N);
}

Complex osc_eigenvalue(int n, int l, double nu, double gamma)
{
  return Complex(-(n + 0.5 * std::abs(l)) * gamma, -l * nu);
}

Complex joint_eigenvalue(Branch b, int n, int l, DerivedParams const &d)
{
  Complex const lam = osc_eigenvalue(n, l, d.params.nu, d.params.gamma);
  switch (b) {
  case Branch::Population: return lam;
  case Branch::CoherencePlus: return lam + Complex(-0.5 * d.Gamma_tilde, -d.omega_tilde);
  case Branch::CoherenceMinus: return lam + Complex(-0.5 * d.Gamma_tilde, d.omega_tilde);
  case Branch::Decay: return lam - d.params.Gamma;
  }
  return lam;
}

Complex overlap_A(int n, int l, Sign s, DerivedParams const &d)
{
  double const  m  = d.m_bar;
  Complex const b  = d.beta;
  Complex const bc = std::conj(b);
  Complex const b2 = b * b;
  int const     p  = std::abs(l);
  double const  pre = (n % 2 == 0 ? 1.0 : -1.0) / factorial<double>(n) * ipow((m + 1.0) * d.beta_abs2, n);
  if (s == Sign::Plus) {
    Complex const ang = l < 0 ? ipow(bc, p) : ipow(-b, l);
    return pre * ang * std::exp(-(m + 1.0) * b2.real() - m * bc * bc + (m + 0.5) * d.beta_abs2);
  }
  Complex const ang = l < 0 ? ipow(-bc, p) : ipow(b, l);
  return pre * ang * std::exp(-m * (b2.real() + bc * bc) - bc * bc + (m + 0.5) * d.beta_abs2);
}

Complex overlap_B(int n, int l, Sign s, DerivedParams const &d)
{
  double const  m  = d.m_bar;
  Complex const b  = d.beta;
  Complex const bc = std::conj(b);
  double const  im_b2 = (b * b).imag();
  int const     p  = std::abs(l);
  double const  pre = (n % 2 == 0 ? 1.0 : -1.0) / factorial<double>(n + p) * ipow(m * d.beta_abs2, n);
  if (s == Sign::Plus) {
    Complex const ang = l < 0 ? ipow(m * bc, p) : ipow(-(m + 1.0) * b, l);
    return pre * ang * std::exp(Complex(-(m + 0.5) * d.beta_abs2, -(m + 1.0) * im_b2));
  }
  Complex const ang = l < 0 ? ipow(-(m + 1.0) * bc, p) : ipow(m * b, l);
  return pre * ang * std::exp(Complex(-(m + 0.5) * d.beta_abs2, -m * im_b2));
}

Complex overlap_C(int n, int l, int m, int k, DerivedParams const &d)
{
  if (m > n || m < 0) return 0.0;
  int const    dn  = n - m;
  double const log_pre = lfac(n) - lfac(m) - lfac(dn) - dn * std::log(d.m_bar + 1.0);
  int const    L = std::abs(l), K = std::abs(k);
  if (l >= 0 && k >= 0) {
    int const q = dn + l - k;
    if (q < 0) return 0.0;
    return beta_monomial(d, log_pre - lfac(q), 2 * dn + l - k, l - k, false);
  }
  if (l < 0 && k < 0) {
    int const q = dn + L - K;
    if (q < 0) return 0.0;
    return beta_monomial(d, log_pre - lfac(q), 2 * dn + L - K, L - K, true);
  }
  if (l < 0) { // k >= 0
    if (dn - k < 0) return 0.0;
    return beta_monomial(d, log_pre + lfac(dn) - lfac(dn - k) - lfac(dn + L), 2 * dn - k + L, L + k, true);
  }
  // l >= 0, k < 0
  if (dn - K < 0) return 0.0;
  return beta_monomial(d, log_pre + lfac(dn) - lfac(dn - K) - lfac(dn + l), 2 * dn - K + l, l + K, false);
}

Complex weight_W(int n, int l, DerivedParams const &d)
{
  double const  m  = d.m_bar;
  Complex const b2 = d.beta * d.beta;
  int const     p  = std::abs(l);
  Complex const env = std::exp(-m * b2 - (m + 1.0) * std::conj(b2));
  if (d.beta_abs2 == 0.0) return (n == 0 && l == 0) ? env : Complex(0.0);
  double const side = l < 0 ? m + 1.0 : m; // coefficient multiplying beta^2 or beta*^2
  if ((n > 0 && m == 0.0) || (l > 0 && m == 0.0)) return 0.0;
  double log_mag = -lfac(n) - lfac(n + p);
  if (n > 0) log_mag += n * std::log(m * (m + 1.0) * d.beta_abs2 * d.beta_abs2);
  if (p > 0) log_mag += p * std::log(side * d.beta_abs2);
  Complex const u2 = b2 / d.beta_abs2;
  Complex const phase = l < 0 ? ipow(std::conj(u2), p) : ipow(u2, p);
  return env * std::exp(log_mag) * phase;
}

Complex weight_W_emission(int n, int l, DerivedParams const &d) { return std::conj(weight_W(n, -l, d)); }

Index padded_cutoff(Index N, double beta_abs2, double mbar)
{
  Index const cap = std::max<Index>(400, N + 40);
  Index P = std::max<Index>(2 * N, N + 40);
  P = std::max<Index>(P, static_cast<Index>(std::ceil(double(N) + 20.0 + 8.0 * beta_abs2)));
  double const r = mbar / (mbar + 1.0);
  while (r > 0.0 && P < cap && std::pow(r, double(P)) * std::pow(double(P), 12.0) >= 1e-18) P += 10;
  return std::min(P, cap);
}

DampingBasis::DampingBasis(DerivedParams d, Index N) : DampingBasis(std::move(d), N, Options{}) {}

DampingBasis::DampingBasis(DerivedParams d, Index N, Options opt)
  : d_(std::move(d)), N_(N), P_(padded_cutoff(N, d_.beta_abs2, d_.m_bar)), opt_(opt)
{
  fock::check_cutoff(N);
  D_beta_        = fock::displacement<double>(d_.beta, P_);
  D_alpha_plus_  = fock::displacement<double>(d_.alpha_plus, P_);
  D_beta_plus_   = fock::displacement<double>(d_.beta_plus, P_);
  D_alpha_minus_ = fock::displacement<double>(d_.alpha_minus, P_);
  D_beta_minus_  = fock::displacement<double>(d_.beta_minus, P_);
}

std::shared_ptr<EigenEntry const> DampingBasis::entry(Branch b, int n, int l) const
{
  if (n < 0) throw std::invalid_argument("DampingBasis::entry: n must be non-negative");
  auto const key = std::make_tuple(static_cast<int>(b), n, l);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto built = std::make_shared<EigenEntry const>(build(b, n, l));
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(key, std::move(built)).first->second;
}

FockOperator DampingBasis::shifted_right(int n, int l, Sign s) const
{
  FockOperator const mu = osc_right(n, l, d_.m_bar, P_);
  if (s == Sign::Plus)
    return D_alpha_plus_ * fock::similarity_shift<double>(mu, d_.varsigma, fock::ShiftDirection::Plus) *
           D_beta_plus_.adjoint();
  return D_alpha_minus_ * fock::similarity_shift<double>(mu, d_.varsigma, fock::ShiftDirection::Minus) *
         D_beta_minus_.adjoint();
}

FockOperator DampingBasis::shifted_left(int n, int l, Sign s) const
{
  FockOperator const mu = osc_left(n, l, d_.m_bar, P_);
  if (s == Sign::Plus)
    return D_beta_plus_ * fock::similarity_shift<double>(mu, d_.varsigma, fock::ShiftDirection::Plus) *
           D_alpha_plus_.adjoint();
  return D_beta_minus_ * fock::similarity_shift<double>(mu, d_.varsigma, fock::ShiftDirection::Minus) *
         D_alpha_minus_.adjoint();
}

FockOperator DampingBasis::displaced(FockOperator const &X) const { return D_beta_ * X * D_beta_.adjoint(); }

namespace {

[[noreturn]] void resonance(int n, int l, Complex denom)
{
  char buf[160];
  std::snprintf(buf, sizeof buf, "decay-branch resolvent is resonant at (n', l') = (%d, %d): |denominator| = %.3g", n,
                l, std::abs(denom));
  throw ResonanceError(n, l, buf);
}

} // namespace

// gg block of the decay element: -sum_{n'l'} Gamma C_{n'l'}^{nl} / (lambda_{n'l'} - lambda_nl + Gamma) mu_hat_{n'l'}.
FockOperator DampingBasis::decay_ground(int n, int l) const
{
  double const Gamma = d_.params.Gamma;
  if (Gamma == 0.0) return -osc_right(n, l, d_.m_bar, N_);

  double const  nu = d_.params.nu, gamma = d_.params.gamma;
  Complex const lam = osc_eigenvalue(n, l, nu, gamma);
  FockOperator  gg  = FockOperator::Zero(N_ + 1, N_ + 1);
  for (int shell = 0; shell <= opt_.max_shells; ++shell) {
    double bound = 0.0;
    for (int dn = 0; dn <= shell; ++dn) {
      int const dl = shell - dn;
      for (int sgn : {1, -1}) {
        if (dl == 0 && sgn < 0) continue;
        int const     n2 = n + dn, l2 = l + sgn * dl;
        Complex const C  = overlap_C(n2, l2, n, l, d_);
        if (C == 0.0) continue;
        Complex const denom = osc_eigenvalue(n2, l2, nu, gamma) - lam + Gamma;
        if (std::abs(denom) < 1e-12 * std::max(1.0, Gamma)) resonance(n2, l2, denom);
        Complex const coef = Gamma * C / denom;
        FockOperator const mu = osc_right(n2, l2, d_.m_bar, N_);
        bound += std::abs(coef) * mu.norm();
        gg -= coef * mu;
      }
    }
    if (shell >= opt_.min_shells && bound < opt_.resolvent_tolerance) return gg;
  }
  throw Error("decay-branch resolvent expansion did not converge within the shell limit");
}

// ee block of the population left element: Gamma sum_{m<=n,k} C_{nl}^{mk} / (Gamma + lambda_nl - lambda_mk) D mu_check†_mk D†.
FockOperator DampingBasis::population_excited_left(int n, int l) const
{
  double const Gamma = d_.params.Gamma;
  if (Gamma == 0.0) return fock::crop(displaced(osc_left(n, l, d_.m_bar, P_)), N_);

  double const  nu = d_.params.nu, gamma = d_.params.gamma;
  Complex const lam = osc_eigenvalue(n, l, nu, gamma);
  FockOperator  sum = FockOperator::Zero(P_ + 1, P_ + 1);
  for (int m = 0; m <= n; ++m) {
    int const kmax = n - m + std::abs(l);
    for (int k = -kmax; k <= kmax; ++k) {
      Complex const C = overlap_C(n, l, m, k, d_);
      if (C == 0.0) continue;
      Complex const denom = Gamma + lam - osc_eigenvalue(m, k, nu, gamma);
      if (std::abs(denom) < 1e-12 * std::max(1.0, Gamma)) resonance(m, k, denom);
      sum += (Gamma * C / denom) * osc_left(m, k, d_.m_bar, P_);
    }
  }
  return fock::crop(displaced(sum), N_);
}

EigenEntry DampingBasis::build(Branch b, int n, int l) const
{
  EigenEntry e{b, n, l, joint_eigenvalue(b, n, l, d_), JointOperator::zero(N_), JointOperator::zero(N_)};
  switch (b) {
  case Branch::Population:
    e.right.gg = osc_right(n, l, d_.m_bar, N_);
    e.left.gg  = osc_left(n, l, d_.m_bar, N_);
    e.left.ee  = population_excited_left(n, l);
    break;
  case Branch::CoherencePlus:
    e.right.eg = fock::crop(shifted_right(n, l, Sign::Plus), N_);
    e.left.ge  = fock::crop(shifted_left(n, l, Sign::Plus), N_);
    break;
  case Branch::CoherenceMinus:
    e.right.ge = fock::crop(shifted_right(n, l, Sign::Minus), N_);
    e.left.eg  = fock::crop(shifted_left(n, l, Sign::Minus), N_);
    break;
  case Branch::Decay:
    e.right.ee = fock::crop(displaced(osc_right(n, l, d_.m_bar, P_)), N_);
    e.right.gg = decay_ground(n, l);
    e.left.ee  = fock::crop(displaced(osc_left(n, l, d_.m_bar, P_)), N_);
    break;
  }
  return e;
}

Complex DampingBasis::trace_A(int n, int l, Sign s) const { return shifted_right(n, l, s).trace(); }

Complex DampingBasis::trace_B(int n, int l, Sign s) const
{
  FockOperator const th = fock::thermal_state<double>(d_.m_bar, P_);
  return fock::trace_product(shifted_left(n, l, s), th);
}

Complex DampingBasis::trace_C(int n, int l, int m, int k) const
{
  return fock::trace_product(osc_left(n, l, d_.m_bar, P_), displaced(osc_right(m, k, d_.m_bar, P_)));
}

FockOperator DampingBasis::decay_ground_by_solve(int n, int l) const
{
  double const  Gamma = d_.params.Gamma;
  FockOperator const Y = fock::crop(displaced(osc_right(n, l, d_.m_bar, P_)), N_);
  oracle::SparseSuperoperator A =
    oracle::build_oscillator_liouvillian(d_.params.nu, d_.params.gamma, d_.m_bar, N_, 0.0);
  Complex const shift = Gamma - osc_eigenvalue(n, l, d_.params.nu, d_.params.gamma);
  oracle::SparseSuperoperator I(A.rows(), A.cols());
  I.setIdentity();
  A += shift * I;
  Eigen::SparseLU<oracle::SparseSuperoperator> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw Error("decay_ground_by_solve: factorization failed");
  CVector const x = lu.solve(-Gamma * oracle::vec(Y));
  return oracle::unvec(x, N_ + 1);
}

} // namespace vibronic
