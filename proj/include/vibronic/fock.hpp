#pragma once

// Truncated Fock-space operator algebra. Every function takes the cutoff N and
// works on the (N+1)-dimensional space spanned by |0>, ..., |N>.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "special.hpp"

namespace vibronic::fock {

template <typename T> using Matrix = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;

enum class ShiftDirection
{
  Plus,  // X(b, b† + s) = e^{s b} X e^{-s b}
  Minus, // X(b, b† - s) = e^{-s b} X e^{s b}
};

// Fock truncation. The recommended value covers a displaced thermal state with
// mean occupation |beta|^2 + mbar.
struct Cutoff
{
  Eigen::Index N;

  static Cutoff recommended(double beta_abs2, double mbar)
  {
    return {static_cast<Eigen::Index>(std::ceil(4.0 * beta_abs2 + 10.0 * mbar + 10.0))};
  }
  Eigen::Index dim() const { return N + 1; }
};

inline void check_cutoff(Eigen::Index N)
{
  if (N < 1) throw std::invalid_argument("Fock cutoff must be at least 1");
}

template <typename T = double> Matrix<T> annihilation(Eigen::Index N)
{
  check_cutoff(N);
  Matrix<T> b = Matrix<T>::Zero(N + 1, N + 1);
  for (Eigen::Index n = 1; n <= N; ++n) b(n - 1, n) = std::sqrt(T(n));
  return b;
}

template <typename T = double> Matrix<T> creation(Eigen::Index N) { return annihilation<T>(N).adjoint(); }

template <typename T = double> Matrix<T> number(Eigen::Index N)
{
  check_cutoff(N);
  Matrix<T> n = Matrix<T>::Zero(N + 1, N + 1);
  for (Eigen::Index k = 0; k <= N; ++k) n(k, k) = T(k);
  return n;
}

template <typename T = double> Matrix<T> identity(Eigen::Index N) { return Matrix<T>::Identity(N + 1, N + 1); }

// D(alpha) = exp(alpha b† - alpha* b) by scaling-and-squaring Padé on the truncated generator.
template <typename T = double> Matrix<T> displacement(std::complex<T> alpha, Eigen::Index N)
{
  Matrix<T> const b = annihilation<T>(N);
  Matrix<T> const gen = alpha * b.adjoint() - std::conj(alpha) * b;
  return gen.exp();
}

// exp(s b) as the exact finite series (b is nilpotent on the truncated space):
// <i| e^{s b} |j> = s^{j-i} sqrt(j!/i!) / (j-i)!, evaluated in log space.
template <typename T = double> Matrix<T> nilpotent_exp(std::complex<T> s, Eigen::Index N)
{
  check_cutoff(N);
  Matrix<T> E = Matrix<T>::Identity(N + 1, N + 1);
  if (s == std::complex<T>(0)) return E;
  T const log_abs = std::log(std::abs(s));
  std::complex<T> const phase = s / std::abs(s);
  std::vector<std::complex<T>> phases(static_cast<std::size_t>(N) + 1);
  phases[0] = std::complex<T>(1);
  for (std::size_t k = 1; k < phases.size(); ++k) phases[k] = phases[k - 1] * phase;
  for (Eigen::Index i = 0; i <= N; ++i) {
    for (Eigen::Index j = i + 1; j <= N; ++j) {
      auto const k = j - i;
      T const lg = T(k) * log_abs + T(0.5) * (std::lgamma(T(j + 1)) - std::lgamma(T(i + 1))) - std::lgamma(T(k + 1));
      E(i, j) = std::exp(lg) * phases[static_cast<std::size_t>(k)];
    }
  }
  return E;
}

// Thermal state p_n = mbar^n / (mbar+1)^{n+1}, renormalized after truncation.
template <typename T = double> Matrix<T> thermal_state(T mbar, Eigen::Index N)
{
  check_cutoff(N);
  if (!(mbar >= T(0))) throw std::invalid_argument("thermal_state: mbar must be non-negative");
  Matrix<T> rho = Matrix<T>::Zero(N + 1, N + 1);
  T const ratio = mbar / (mbar + T(1));
  T p = T(1) / (mbar + T(1));
  T total{0};
  for (Eigen::Index n = 0; n <= N; ++n) {
    rho(n, n) = p;
    total += p;
    p *= ratio;
  }
  return rho / total;
}

// exp(±s b) X exp(∓s b), i.e. X(b, b† ± s).
template <typename T = double>
Matrix<T> similarity_shift(Matrix<T> const &X, std::complex<T> s, ShiftDirection dir)
{
  Eigen::Index const N = X.rows() - 1;
  std::complex<T> const signed_s = dir == ShiftDirection::Plus ? s : -s;
  return nilpotent_exp<T>(signed_s, N) * X * nilpotent_exp<T>(-signed_s, N);
}

template <typename T = double> Matrix<T> displaced_thermal_state(std::complex<T> alpha, T mbar, Eigen::Index N)
{
  Matrix<T> const D = displacement<T>(alpha, N);
  return D * thermal_state<T>(mbar, N) * D.adjoint();
}

// Exact <m| D(alpha) |n> of the untruncated displacement for m < rows, n < cols:
// sqrt(n!/m!) alpha^{m-n} e^{-|alpha|^2/2} L_n^{m-n}(|alpha|^2) for m >= n, and the
// mirrored form with -alpha* otherwise.
template <typename T = double>
Matrix<T> displacement_elements(std::complex<T> alpha, Eigen::Index rows, Eigen::Index cols)
{
  Matrix<T> D(rows, cols);
  T const x = std::norm(alpha);
  T const r = std::abs(alpha);
  std::complex<T> const up = r > T(0) ? alpha / r : std::complex<T>(1);
  std::complex<T> const down = -std::conj(up);
  for (Eigen::Index m = 0; m < rows; ++m) {
    for (Eigen::Index n = 0; n < cols; ++n) {
      auto const lo = std::min(m, n), k = m > n ? m - n : n - m;
      if (k > 0 && r == T(0)) {
        D(m, n) = 0;
        continue;
      }
      T const lg = T(0.5) * (std::lgamma(T(lo + 1)) - std::lgamma(T(lo + k + 1))) - T(0.5) * x +
                   (k > 0 ? T(k) * std::log(r) : T(0));
      T const L = special::laguerre<T>(int(lo), int(k), x);
      std::complex<T> const ph = special::ipow(m >= n ? up : down, int(k));
      D(m, n) = std::exp(lg) * L * ph;
    }
  }
  return D;
}

// Upper-left (N+1)-block of D(alpha) mu_th(mbar) D†(alpha) for the untruncated
// thermal state; the thermal sum stops once p_k < 1e-20 p_0.
template <typename T = double> Matrix<T> displaced_thermal_block(std::complex<T> alpha, T mbar, Eigen::Index N)
{
  check_cutoff(N);
  T const ratio = mbar / (mbar + T(1));
  Eigen::Index K = 1;
  if (ratio > T(0)) K = Eigen::Index(std::ceil(std::log(T(1e-20)) / std::log(ratio))) + 1;
  Matrix<T> const D = displacement_elements<T>(alpha, N + 1, K);
  Eigen::Matrix<T, Eigen::Dynamic, 1> p(K);
  p(0) = T(1) / (mbar + T(1));
  for (Eigen::Index k = 1; k < K; ++k) p(k) = p(k - 1) * ratio;
  return D * p.asDiagonal() * D.adjoint();
}

// Hilbert-Schmidt inner product Tr[X† Y].
template <typename T = double> std::complex<T> hs_inner(Matrix<T> const &X, Matrix<T> const &Y)
{
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw std::invalid_argument("hs_inner: dimension mismatch");
  return (X.conjugate().cwiseProduct(Y)).sum();
}

// Tr[X Y] without forming the product.
template <typename T = double> std::complex<T> trace_product(Matrix<T> const &X, Matrix<T> const &Y)
{
  if (X.cols() != Y.rows() || X.rows() != Y.cols())
    throw std::invalid_argument("trace_product: dimension mismatch");
  return (X.transpose().cwiseProduct(Y)).sum();
}

// Upper-left block on the cutoff N.
template <typename Derived> auto crop(Eigen::MatrixBase<Derived> const &X, Eigen::Index N)
{
  return X.topLeftCorner(N + 1, N + 1).eval();
}

// Number of retained Fock levels when masking the top 20% of the range.
inline Eigen::Index edge_limit(Eigen::Index dim, double keep = 0.8)
{
  return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::floor(keep * static_cast<double>(dim))));
}

template <typename Derived> double masked_norm(Eigen::MatrixBase<Derived> const &X, double keep = 0.8)
{
  Eigen::Index const k = edge_limit(X.rows(), keep);
  return X.topLeftCorner(k, k).norm();
}

} // namespace vibronic::fock
