#include "vibronic/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "vibronic/fock.hpp"

namespace vibronic::oracle {

namespace {

using Triplet = Eigen::Triplet<Complex>;

void check_oracle_cutoff(Index N)
{
  fock::check_cutoff(N);
  if (N > kMaxCutoff) throw std::invalid_argument("oracle: Fock cutoff exceeds the superoperator size limit");
}

// P ⊗ Q from the nonzeros of two dense factors.
SparseSuperoperator kron(CMatrix const &P, CMatrix const &Q)
{
  std::vector<std::pair<Index, Index>> qnz;
  for (Index l = 0; l < Q.cols(); ++l)
    for (Index k = 0; k < Q.rows(); ++k)
      if (Q(k, l) != Complex(0.0)) qnz.emplace_back(k, l);
  std::vector<Triplet> t;
  for (Index j = 0; j < P.cols(); ++j)
    for (Index i = 0; i < P.rows(); ++i) {
      Complex const pij = P(i, j);
      if (pij == Complex(0.0)) continue;
      for (auto [k, l] : qnz) t.emplace_back(i * Q.rows() + k, j * Q.cols() + l, pij * Q(k, l));
    }
  SparseSuperoperator S(P.rows() * Q.rows(), P.cols() * Q.cols());
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

SparseSuperoperator identity(Index n)
{
  SparseSuperoperator I(n, n);
  I.setIdentity();
  return I;
}

// Rows/cols of L restricted to an index subset, in subset order.
SparseSuperoperator restrict(SparseSuperoperator const &L, std::vector<Index> const &idx)
{
  std::vector<Index> local(static_cast<std::size_t>(L.rows()), -1);
  for (std::size_t a = 0; a < idx.size(); ++a) local[static_cast<std::size_t>(idx[a])] = static_cast<Index>(a);
  std::vector<Triplet> t;
  for (Index c = 0; c < L.outerSize(); ++c) {
    Index const lc = local[static_cast<std::size_t>(c)];
    if (lc < 0) continue;
    for (SparseSuperoperator::InnerIterator it(L, c); it; ++it) {
      Index const lr = local[static_cast<std::size_t>(it.row())];
      if (lr >= 0) t.emplace_back(lr, lc, it.value());
    }
  }
  auto const n = static_cast<Index>(idx.size());
  SparseSuperoperator S(n, n);
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

// vec indices of the electronic block (row el_r, col el_c) of a joint operator.
std::vector<Index> block_indices(Index N, int el_r, int el_c)
{
  Index const d = N + 1, D = 2 * d;
  std::vector<Index> idx;
  idx.reserve(static_cast<std::size_t>(d * d));
  for (Index c = 0; c < d; ++c)
    for (Index r = 0; r < d; ++r) idx.push_back((el_c * d + c) * D + el_r * d + r);
  return idx;
}

// Solve with the first equation replaced by the unit-trace condition.
CVector normalized_null_vector(SparseSuperoperator const &L, Index dim)
{
  std::vector<Triplet> t;
  for (Index c = 0; c < L.outerSize(); ++c)
    for (SparseSuperoperator::InnerIterator it(L, c); it; ++it)
      if (it.row() != 0) t.emplace_back(it.row(), c, it.value());
  for (Index k = 0; k < dim; ++k) t.emplace_back(0, k * (dim + 1), Complex(1.0));
  SparseSuperoperator A(L.rows(), L.cols());
  A.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<SparseSuperoperator> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw Error("steady_state: null space of the generator is degenerate");
  CVector rhs = CVector::Zero(L.rows());
  rhs(0) = 1.0;
  CVector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw Error("steady_state: null space of the generator is degenerate");
  return x;
}

} // namespace

CVector vec(CMatrix const &X) { return Eigen::Map<CVector const>(X.data(), X.size()); }

CMatrix unvec(CVector const &v, Index dim)
{
  if (v.size() != dim * dim) throw std::invalid_argument("unvec: size mismatch");
  return Eigen::Map<CMatrix const>(v.data(), dim, dim);
}

SparseSuperoperator left_multiply(CMatrix const &A) { return kron(CMatrix::Identity(A.rows(), A.cols()), A); }
SparseSuperoperator right_multiply(CMatrix const &B) { return kron(B.transpose(), CMatrix::Identity(B.rows(), B.cols())); }
SparseSuperoperator sandwich(CMatrix const &A, CMatrix const &B) { return kron(B.transpose(), A); }

SparseSuperoperator commutator_generator(CMatrix const &H)
{
  return Complex(0.0, -1.0) * (left_multiply(H) - right_multiply(H));
}

SparseSuperoperator dissipator(CMatrix const &J)
{
  CMatrix const JdJ = J.adjoint() * J;
  return 2.0 * sandwich(J, J.adjoint()) - left_multiply(JdJ) - right_multiply(JdJ);
}

CMatrix joint_hamiltonian(ModelParams const &p, Index N)
{
  check_oracle_cutoff(N);
  Index const  d = N + 1;
  CMatrix const b = fock::annihilation<double>(N);
  CMatrix const bd = b.adjoint();
  CMatrix H = CMatrix::Zero(2 * d, 2 * d);
  H.topLeftCorner(d, d)     = p.nu * bd * b;
  H.bottomRightCorner(d, d) = p.nu * bd * b + p.omega * CMatrix::Identity(d, d) + p.eta * (b + bd);
  return H;
}

CMatrix sigma_minus(Index N)
{
  Index const d = N + 1;
  CMatrix s = CMatrix::Zero(2 * d, 2 * d);
  s.topRightCorner(d, d).setIdentity();
  return s;
}

CMatrix joint_annihilation(Index N)
{
  Index const d = N + 1;
  CMatrix const b = fock::annihilation<double>(N);
  CMatrix B = CMatrix::Zero(2 * d, 2 * d);
  B.topLeftCorner(d, d)     = b;
  B.bottomRightCorner(d, d) = b;
  return B;
}

SparseSuperoperator build_liouvillian(ModelParams const &p, Index N)
{
  check_oracle_cutoff(N);
  double const  mbar = p.m_bar();
  Index const   d = N + 1;
  CMatrix const sm = sigma_minus(N);
  CMatrix const B  = joint_annihilation(N);
  CMatrix       se = CMatrix::Zero(2 * d, 2 * d);
  se.bottomRightCorner(d, d).setIdentity();

  SparseSuperoperator L = commutator_generator(joint_hamiltonian(p, N));
  if (p.Gamma != 0.0) L += (0.5 * p.Gamma) * dissipator(sm);
  L += (0.5 * p.gamma * (mbar + 1.0)) * dissipator(B);
  if (mbar != 0.0) L += (0.5 * p.gamma * mbar) * dissipator(B.adjoint());
  if (p.Gamma_star != 0.0) L += (0.5 * p.Gamma_star) * dissipator(se);
  L.prune(Complex(0.0));
  return L;
}

SparseSuperoperator build_oscillator_liouvillian(double nu, double gamma, double mbar, Index N, double eta)
{
  check_oracle_cutoff(N);
  CMatrix const b = fock::annihilation<double>(N);
  CMatrix const H = nu * b.adjoint() * b + eta * (b + b.adjoint());
  SparseSuperoperator L = commutator_generator(H);
  L += (0.5 * gamma * (mbar + 1.0)) * dissipator(b);
  if (mbar != 0.0) L += (0.5 * gamma * mbar) * dissipator(b.adjoint());
  L.prune(Complex(0.0));
  return L;
}

JointOperator apply(SparseSuperoperator const &L, JointOperator const &X)
{
  CMatrix const Xd = X.dense();
  CVector const v = L * vec(Xd);
  return JointOperator::from_dense(unvec(v, Xd.rows()));
}

JointOperator apply_left(SparseSuperoperator const &L, JointOperator const &A)
{
  CMatrix const Ad = A.dense();
  CVector const v = L.transpose() * vec(Ad.transpose());
  return JointOperator::from_dense(unvec(v, Ad.rows()).transpose());
}

double trace_preservation_residual(SparseSuperoperator const &L, Index dim)
{
  CVector const one = vec(CMatrix::Identity(dim, dim));
  CVector const r = L.transpose() * one;
  return r.cwiseAbs().maxCoeff();
}

namespace {

struct TaylorStepper
{
  SparseSuperoperator A; // L - mu I
  Complex             mu;
  double              hmax;

  explicit TaylorStepper(SparseSuperoperator const &L)
  {
    Index const n = L.rows();
    mu = L.diagonal().sum() / double(n);
    A  = L - mu * identity(n);
    double norm1 = 0.0;
    for (Index c = 0; c < A.outerSize(); ++c) {
      double col = 0.0;
      for (SparseSuperoperator::InnerIterator it(A, c); it; ++it) col += std::abs(it.value());
      norm1 = std::max(norm1, col);
    }
    hmax = norm1 > 0.0 ? 2.0 / norm1 : 1e300;
  }

  void step(CVector &x, double h) const
  {
    CVector term = x, sum = x;
    double const scale = x.norm();
    for (int k = 1; k <= 80; ++k) {
      term = (A * term) * (h / double(k));
      sum += term;
      if (term.norm() <= 1e-17 * scale) break;
    }
    x = std::exp(mu * h) * sum;
  }

  void advance(CVector &x, double dt) const
  {
    if (dt <= 0.0) return;
    auto const steps = static_cast<long>(std::ceil(dt / hmax));
    double const h = dt / double(steps);
    for (long s = 0; s < steps; ++s) step(x, h);
  }
};

// Dormand-Prince 5(4) with standard step-size control.
void dormand_prince(SparseSuperoperator const &L, CVector &x, double dt, double tol)
{
  if (dt <= 0.0) return;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  double t = 0.0, h = std::min(dt, 0.01);
  CVector k1 = L * x;
  long   guard = 0;
  while (t < dt) {
    if (++guard > 50'000'000) throw Error("propagate: Dormand-Prince step-size collapse");
    h = std::min(h, dt - t);
    CVector const k2 = L * (x + h * a21 * k1);
    CVector const k3 = L * (x + h * (a31 * k1 + a32 * k2));
    CVector const k4 = L * (x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    CVector const k5 = L * (x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    CVector const k6 = L * (x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    CVector const x5 = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    CVector const k7 = L * x5;
    CVector const err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double const scale = tol * (1.0 + x5.cwiseAbs().maxCoeff());
    double const ratio = err.cwiseAbs().maxCoeff() / scale;
    if (ratio <= 1.0) {
      t += h;
      x  = x5;
      k1 = k7;
    }
    double const factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    h *= factor;
    if (h < 1e-14 * std::max(1.0, dt)) throw Error("propagate: Dormand-Prince step-size collapse");
  }
}

} // namespace

PropagationResult propagate(SparseSuperoperator const &L, JointOperator const &rho0, std::vector<double> const &times,
                            Propagator method, double tolerance)
{
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0))
    throw std::invalid_argument("propagate: times must be non-negative and non-decreasing");
  CMatrix const r0 = rho0.dense();
  if (L.rows() != r0.size()) throw std::invalid_argument("propagate: state does not match the generator");
  Index const dim = r0.rows();
  CVector     x   = vec(r0);

  PropagationResult out;
  out.times = times;
  std::optional<TaylorStepper> taylor;
  if (method == Propagator::Taylor) taylor.emplace(L);
  double t = 0.0;
  for (double target : times) {
    if (method == Propagator::Taylor)
      taylor->advance(x, target - t);
    else
      dormand_prince(L, x, target - t, tolerance);
    t = target;
    out.states.push_back(JointOperator::from_dense(unvec(x, dim)));
  }
  return out;
}

JointOperator steady_state(SparseSuperoperator const &L, Index N)
{
  Index const dim = 2 * (N + 1);
  if (L.rows() != dim * dim) throw std::invalid_argument("steady_state: generator does not match the cutoff");
  CMatrix rho = unvec(normalized_null_vector(L, dim), dim);
  rho /= rho.trace();
  return JointOperator::from_dense(rho);
}

FockOperator oscillator_steady_state(SparseSuperoperator const &L, Index N)
{
  Index const dim = N + 1;
  if (L.rows() != dim * dim) throw std::invalid_argument("oscillator_steady_state: generator does not match the cutoff");
  CMatrix mu = unvec(normalized_null_vector(L, dim), dim);
  return mu / mu.trace();
}

Hygiene hygiene(JointOperator const &X)
{
  CMatrix const Xd = X.dense();
  Hygiene h;
  h.hermiticity = (Xd - Xd.adjoint()).cwiseAbs().maxCoeff();
  h.trace_error = std::abs(Xd.trace() - 1.0);
  CMatrix const herm = 0.5 * (Xd + Xd.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  h.min_eigenvalue = es.eigenvalues().minCoeff();
  return h;
}

std::vector<Complex> eigenvalues_near(SparseSuperoperator const &L, Complex shift, int count, int krylov)
{
  Index const n = L.rows();
  krylov = std::min<int>(krylov, static_cast<int>(n));
  Eigen::SparseLU<SparseSuperoperator> lu;
  lu.compute(L - shift * identity(n));
  if (lu.info() != Eigen::Success) return {shift}; // shift is (numerically) an eigenvalue

  std::mt19937_64                        rng(0x5eed);
  std::normal_distribution<double>       gauss;
  CVector q(n);
  for (Index i = 0; i < n; ++i) q(i) = Complex(gauss(rng), gauss(rng));
  CMatrix V = CMatrix::Zero(n, krylov + 1);
  CMatrix H = CMatrix::Zero(krylov + 1, krylov);
  V.col(0) = q / q.norm();
  int m = krylov;
  for (int j = 0; j < krylov; ++j) {
    CVector w = lu.solve(V.col(j));
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        Complex const h = V.col(i).dot(w);
        H(i, j) += h;
        w -= h * V.col(i);
      }
    }
    double const beta = w.norm();
    H(j + 1, j) = beta;
    if (beta < 1e-14) {
      m = j + 1;
      break;
    }
    V.col(j + 1) = w / beta;
  }
  Eigen::ComplexEigenSolver<CMatrix> es(H.topLeftCorner(m, m), false);
  std::vector<Complex> lambdas;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    Complex const theta = es.eigenvalues()(i);
    if (std::abs(theta) > 0.0) lambdas.push_back(shift + 1.0 / theta);
  }
  std::sort(lambdas.begin(), lambdas.end(),
            [&](Complex a, Complex b) { return std::abs(a - shift) < std::abs(b - shift); });
  if (static_cast<int>(lambdas.size()) > count) lambdas.resize(static_cast<std::size_t>(count));
  return lambdas;
}

// Absorption: x = rho_st sigma_- with rho_st the numerical null vector of L.
// Emission: the emitter starts in |e> with the oscillator relaxed in the
// excited manifold (numerical null vector of the driven oscillator
// generator); the integral over the excited-state lifetime is the solve
// y = -L_ee^{-1} vec(mu_0), and x = sigma_- (|e><e| ⊗ y).
// In both cases the ge sector is invariant under L, so the resolvent is
// solved on that block only.
std::vector<double> correlation_spectrum(SpectrumKind kind, std::vector<double> const &offsets, ModelParams const &p,
                                         Index N)
{
  SparseSuperoperator const L   = build_liouvillian(p, N);
  Index const               d   = N + 1;
  auto const                ge  = block_indices(N, 0, 1);
  SparseSuperoperator const Lge = restrict(L, ge);

  CVector x;
  if (kind == SpectrumKind::Absorption) {
    JointOperator const rho = steady_state(L, N);
    x = vec(rho.gg); // (rho_st sigma_-)_ge = rho_gg
  } else {
    if (!(p.Gamma > 0.0)) throw InvalidParams("emission spectrum requires Gamma > 0");
    FockOperator const mu0 =
      oscillator_steady_state(build_oscillator_liouvillian(p.nu, p.gamma, p.m_bar(), N, p.eta), N);
    SparseSuperoperator const Lee = restrict(L, block_indices(N, 1, 1));
    Eigen::SparseLU<SparseSuperoperator> lu;
    lu.compute(Lee);
    if (lu.info() != Eigen::Success) throw Error("emission: excited-manifold generator is singular");
    x = lu.solve(CVector(-vec(mu0)));
  }

  SparseSuperoperator const I = identity(Lge.rows());
  Eigen::SparseLU<SparseSuperoperator> lu;
  SparseSuperoperator A = Complex(0.0, p.omega) * I - Lge;
  lu.analyzePattern(A);
  std::vector<double> out;
  out.reserve(offsets.size());
  for (double off : offsets) {
    A = Complex(0.0, p.omega + off) * I - Lge;
    lu.factorize(A);
    if (lu.info() != Eigen::Success) throw Error("correlation_spectrum: near-singular resolvent");
    CVector const v = lu.solve(x);
    out.push_back(unvec(v, d).trace().real());
  }
  return out;
}

} // namespace vibronic::oracle
