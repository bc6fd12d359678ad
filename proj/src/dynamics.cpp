#include "vibronic/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vibronic/fock.hpp"
#include "vibronic/special.hpp"

namespace vibronic {

Eigen::Matrix2cd TlsState::matrix() const
{
  Eigen::Matrix2cd r;
  r << rho_gg, rho_ge, std::conj(rho_ge), rho_ee;
  return r;
}

TlsState TlsState::from_matrix(Eigen::Matrix2cd const &rho)
{
  return {rho(0, 0).real(), rho(1, 1).real(), rho(0, 1)};
}

TlsState TlsState::equal_superposition(double phi)
{
  return {0.5, 0.5, 0.5 * std::exp(Complex(0.0, -phi))};
}

Complex beta_t(double t, DerivedParams const &d)
{
  return d.beta * std::exp(-Complex(0.5 * d.params.gamma, d.params.nu) * t);
}

std::vector<Complex> beta_trajectory(std::vector<double> const &times, DerivedParams const &d)
{
  std::vector<Complex> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(d.beta - beta_t(t, d));
  return out;
}

TlsState tls_evolve(TlsState const &rho0, double t, DerivedParams const &d)
{
  if (!(t >= 0.0)) throw std::invalid_argument("tls_evolve: t must be non-negative");
  double const decay = std::exp(-d.params.Gamma * t);
  TlsState     r;
  r.rho_ee = rho0.rho_ee * decay;
  r.rho_gg = rho0.rho_gg + rho0.rho_ee * (1.0 - decay);

  // bar beta^2(t) = beta^2 (e^{-(i nu + gamma/2) t} - 1); the dephasing factor
  // pairs mbar with bar beta^2 and (mbar + 1) with its complex conjugate.
  double const  m  = d.m_bar;
  Complex const bb = d.beta * d.beta * (std::exp(-Complex(0.5 * d.params.gamma, d.params.nu) * t) - 1.0);
  Complex const phase = std::exp(Complex(-0.5 * d.Gamma_tilde * t, d.omega_tilde * t));
  r.rho_ge = rho0.rho_ge * phase * std::exp(m * bb + (m + 1.0) * std::conj(bb));
  return r;
}

namespace {

FockOperator displaced_thermal(Complex alpha, double mbar, Index N)
{
  return fock::displaced_thermal_block<double>(alpha, mbar, N);
}

FockOperator decay_integral(double t, DerivedParams const &d, Index N, int order)
{
  auto const [x, w] = special::gauss_legendre<double>(order);
  Complex const bt  = beta_t(t, d);
  FockOperator acc  = FockOperator::Zero(N + 1, N + 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double const tau = 0.5 * t * (x[i] + 1.0);
    acc += (0.5 * t * w[i] * std::exp(-d.params.Gamma * tau)) *
           displaced_thermal(beta_t(t - tau, d) - bt, d.m_bar, N);
  }
  return acc;
}

} // namespace

FockOperator osc_evolve(TlsState const &rho0, double t, DerivedParams const &d, Index N, int order)
{
  if (!(t >= 0.0)) throw std::invalid_argument("osc_evolve: t must be non-negative");
  if (order < 1) throw std::invalid_argument("osc_evolve: quadrature order must be positive");
  FockOperator mu = rho0.rho_gg * fock::thermal_state<double>(d.m_bar, N);
  if (rho0.rho_ee == 0.0) return mu;

  double const Gamma = d.params.Gamma;
  mu += (rho0.rho_ee * std::exp(-Gamma * t)) * displaced_thermal(d.beta - beta_t(t, d), d.m_bar, N);
  if (Gamma == 0.0 || t == 0.0) return mu;

  FockOperator prev = decay_integral(t, d, N, order);
  for (int q = 2 * order; q <= 1024; q *= 2) {
    FockOperator next = decay_integral(t, d, N, q);
    double const diff = (next - prev).cwiseAbs().maxCoeff();
    prev = std::move(next);
    if (diff < 1e-9) return mu + (rho0.rho_ee * Gamma) * prev;
  }
  throw Error("osc_evolve: quadrature did not stabilize at 1e-9");
}

Complex Expansion::coefficient(Branch b, int n, int l) const
{
  for (auto const &term : terms)
    if (term.branch == b && term.n == n && term.l == l) return term.coefficient;
  return 0.0;
}

Expansion expand(JointOperator const &rho0, DampingBasis const &basis, ExpansionTruncation trunc)
{
  if (rho0.cutoff() != basis.cutoff()) throw std::invalid_argument("expand: state and basis cutoffs differ");
  if (std::abs(rho0.trace() - 1.0) > 1e-8) throw std::invalid_argument("expand: initial state must have unit trace");
  Expansion out{trunc, {}};
  auto const branches = {Branch::Population, Branch::CoherencePlus, Branch::CoherenceMinus, Branch::Decay};
  if (!(trunc.tolerance > 0.0)) {
    for (Branch b : branches)
      for (int n = 0; n <= trunc.n_max; ++n)
        for (int l = -trunc.l_max; l <= trunc.l_max; ++l)
          out.terms.push_back({b, n, l, dual_pair(basis.left(b, n, l), rho0)});
    return out;
  }
  for (Branch b : branches) {
    bool converged = false;
    for (int s = 0; s <= trunc.max_shell && !converged; ++s) {
      double shell = 0.0;
      for (int n = 0; n <= s; ++n) {
        int const dl = s - n;
        for (int l : {-dl, dl}) {
          auto const    e = basis.entry(b, n, l);
          Complex const c = dual_pair(e->left, rho0);
          out.terms.push_back({b, n, l, c});
          shell += std::abs(c) * e->right.norm();
          if (dl == 0) break;
        }
      }
      converged = s >= 3 && shell < trunc.tolerance;
    }
    if (!converged) throw Error("expand: shell tolerance not reached within max_shell");
  }
  return out;
}

JointOperator evolve_expansion(Expansion const &c, DampingBasis const &basis, double t)
{
  if (!(t >= 0.0)) throw std::invalid_argument("evolve_expansion: t must be non-negative");
  JointOperator out = JointOperator::zero(basis.cutoff());
  for (auto const &term : c.terms) {
    if (std::abs(term.coefficient) < 1e-300) continue;
    auto const e = basis.entry(term.branch, term.n, term.l);
    out += (term.coefficient * std::exp(e->eigenvalue * t)) * e->right;
  }
  return out;
}

double PhaseSpaceGrid::integral() const { return values.sum() * step * step; }

Complex PhaseSpaceGrid::center_of_mass() const
{
  double sx = 0.0, sp = 0.0, total = 0.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      double const v = values(i, j);
      sx += v * x[std::size_t(i)];
      sp += v * p[std::size_t(j)];
      total += v;
    }
  return {sx / total, sp / total};
}

double PhaseSpaceGrid::max_value() const { return values.maxCoeff(); }

namespace {

std::vector<double> axis(double lo, double hi, double step)
{
  if (!(step > 0.0) || !(hi > lo)) throw std::invalid_argument("wigner: grid needs lo < hi and step > 0");
  auto const n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + double(i) * step;
  return v;
}

} // namespace

PhaseSpaceGrid wigner(FockOperator const &mu, GridSpec const &spec)
{
  Index const N = mu.rows() - 1;
  fock::check_cutoff(N);
  PhaseSpaceGrid g;
  g.x    = axis(spec.x_min, spec.x_max, spec.step);
  g.p    = axis(spec.p_min, spec.p_max, spec.step);
  g.step = spec.step;
  g.values.resize(Eigen::Index(g.x.size()), Eigen::Index(g.p.size()));

  // f(n, k) = sqrt(n!/(n+k)!) L_n^k(x) by recurrence in n for every k.
  std::vector<double> f(std::size_t(N + 1));
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    for (std::size_t j = 0; j < g.p.size(); ++j) {
      Complex const gam(2.0 * g.x[i], 2.0 * g.p[j]);
      double const  xx = std::norm(gam);
      Complex       gk(1.0), mgk(1.0); // gam^k and (-conj gam)^k
      Complex       total = 0.0;
      for (Index k = 0; k <= N; ++k) {
        double Lprev = 1.0, Lcur = 1.0 + double(k) - xx, ratio = 1.0;
        for (Index n = 0; n + k <= N; ++n) {
          if (n == 0) {
            ratio = 1.0;
            for (Index a = 1; a <= k; ++a) ratio /= std::sqrt(double(a));
            f[std::size_t(n)] = ratio;
          } else {
            if (n >= 2) {
              double const next = ((2.0 * double(n - 1) + 1.0 + double(k) - xx) * Lcur - (double(n - 1) + double(k)) * Lprev) / double(n);
              Lprev = Lcur;
              Lcur  = next;
            }
            ratio *= std::sqrt(double(n) / double(n + k));
            f[std::size_t(n)] = ratio * Lcur;
          }
        }
        Complex up = 0.0, down = 0.0;
        for (Index n = 0; n + k <= N; ++n) {
          double const sgn = n % 2 == 0 ? 1.0 : -1.0;
          up += sgn * mu(n, n + k) * f[std::size_t(n)];
          if (k > 0) down += ((n + k) % 2 == 0 ? 1.0 : -1.0) * mu(n + k, n) * f[std::size_t(n)];
        }
        total += gk * up + mgk * down;
        gk *= gam;
        mgk *= -std::conj(gam);
      }
      g.values(Eigen::Index(i), Eigen::Index(j)) = (2.0 / std::numbers::pi) * std::exp(-0.5 * xx) * total.real();
    }
  }

  double const trace = mu.trace().real();
  double const sigma = 0.5; // vacuum width in these coordinates
  if (spec.step > 0.5 * sigma)
    g.advisories.push_back("grid step exceeds half the vacuum width; features may be under-resolved");
  if (std::abs(g.integral() - trace) > 1e-3)
    g.advisories.push_back("grid integral deviates from Tr[mu] by more than 1e-3; widen the window or refine the step");
  return g;
}

} // namespace vibronic
