#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace vibronic::special {

template <typename T> T factorial(int n)
{
  T r{1};
  for (int k = 2; k <= n; ++k) r *= T(k);
  return r;
}

template <typename T> T binomial(int n, int k)
{
  if (k < 0 || k > n) return T{0};
  k = std::min(k, n - k);
  T r{1};
  for (int i = 1; i <= k; ++i) r = r * T(n - k + i) / T(i);
  return r;
}

// Integer power by repeated multiplication (no complex log, no branch cut).
// ipow(z, 0) == 1 also for z == 0.
template <typename Z> Z ipow(Z const &z, int k)
{
  if (k < 0) return Z{1} / ipow(z, -k);
  Z r{1};
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

// Associated Laguerre polynomial L_n^alpha(x) by the three-term recurrence.
// X may be real or complex.
template <typename X> X laguerre(int n, int alpha, X const &x)
{
  if (n < 0) throw std::invalid_argument("laguerre: n must be non-negative");
  X prev{1};
  if (n == 0) return prev;
  X cur = X(1 + alpha) - x;
  for (int k = 1; k < n; ++k) {
    X next = ((X(2 * k + 1 + alpha) - x) * cur - X(k + alpha) * prev) / X(k + 1);
    prev   = cur;
    cur    = next;
  }
  return cur;
}

// Power-series coefficients c_a of L_n^alpha(x) = sum_a c_a x^a, a = 0..n.
template <typename T> std::vector<T> laguerre_coefficients(int n, int alpha)
{
  std::vector<T> c(static_cast<std::size_t>(n) + 1);
  for (int a = 0; a <= n; ++a) {
    T const sign = (a % 2 == 0) ? T{1} : T{-1};
    c[static_cast<std::size_t>(a)] = sign * binomial<T>(n + alpha, n - a) / factorial<T>(a);
  }
  return c;
}

// Modified Bessel function of the first kind, integer order.
template <typename T> T bessel_i(int l, T x)
{
  return static_cast<T>(std::cyl_bessel_i(static_cast<double>(std::abs(l)), static_cast<double>(x)));
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
template <typename T> std::pair<std::vector<T>, std::vector<T>> gauss_legendre(int order)
{
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  std::vector<T> nodes(static_cast<std::size_t>(order)), weights(static_cast<std::size_t>(order));
  int const half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    T x = std::cos(std::numbers::pi_v<T> * (T(i) + T(0.75)) / (T(order) + T(0.5)));
    T dp{0};
    for (int it = 0; it < 100; ++it) {
      T p0{1}, p1 = x;
      for (int k = 2; k <= order; ++k) {
        T p2 = ((T(2 * k - 1)) * x * p1 - T(k - 1) * p0) / T(k);
        p0   = p1;
        p1   = p2;
      }
      dp       = T(order) * (x * p1 - p0) / (x * x - T(1));
      T const dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < T(1e-16)) break;
    }
    auto const a = static_cast<std::size_t>(i);
    auto const b = static_cast<std::size_t>(order - 1 - i);
    nodes[a]     = -x;
    nodes[b]     = x;
    weights[a] = weights[b] = T(2) / ((T(1) - x * x) * dp * dp);
  }
  return {nodes, weights};
}

} // namespace vibronic::special
