#pragma once

// Closed-form time evolution from a thermal oscillator, generic damping-basis
// propagation, and Wigner sampling on a phase-space grid.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "basis.hpp"
#include "joint.hpp"
#include "model.hpp"
#include "types.hpp"

namespace vibronic {

struct TlsState
{
  double  rho_gg = 1.0;
  double  rho_ee = 0.0;
  Complex rho_ge = 0.0; // <g| rho |e>

  Eigen::Matrix2cd matrix() const;
  static TlsState  from_matrix(Eigen::Matrix2cd const &rho);
  // (|g> + e^{i phi} |e>) / sqrt(2)
  static TlsState equal_superposition(double phi = 0.0);
};

// Reduced emitter state at time t, oscillator initially thermal.
TlsState tls_evolve(TlsState const &rho0, double t, DerivedParams const &d);

// beta(t) = beta e^{-(i nu + gamma/2) t}; the excited-manifold oscillator is
// centred at beta - beta(t).
Complex beta_t(double t, DerivedParams const &d);
std::vector<Complex> beta_trajectory(std::vector<double> const &times, DerivedParams const &d);

// Reduced oscillator state at time t (electronic trace), oscillator initially thermal.
// The decay integral uses Gauss-Legendre with order doubling from `order`
// until successive results agree to 1e-9.
FockOperator osc_evolve(TlsState const &rho0, double t, DerivedParams const &d, Index N, int order = 16);

// Either the box n <= n_max, |l| <= l_max, or (tolerance > 0) per-branch shells of
// n + |l| until a shell's sum |c| ||rho_hat|| drops below the tolerance.
struct ExpansionTruncation
{
  int    n_max     = 8;
  int    l_max     = 16;
  double tolerance = 0.0;
  int    max_shell = 64;
};

struct ExpansionTerm
{
  Branch  branch;
  int     n, l;
  Complex coefficient;
};

struct Expansion
{
  ExpansionTruncation        truncation;
  std::vector<ExpansionTerm> terms;

  Complex coefficient(Branch b, int n, int l) const;
};

// c_lambda = Tr[rho_check†_lambda rho0] over the truncated index set.
Expansion expand(JointOperator const &rho0, DampingBasis const &basis, ExpansionTruncation trunc = {});
// sum_lambda c_lambda e^{lambda t} rho_hat_lambda
JointOperator evolve_expansion(Expansion const &c, DampingBasis const &basis, double t);

// Phase-space coordinates alpha = X + iP with X = x/2xi and P = p xi/hbar.
struct GridSpec
{
  double x_min = -6.0, x_max = 6.0;
  double p_min = -6.0, p_max = 6.0;
  double step  = 0.05;
};

struct PhaseSpaceGrid
{
  std::vector<double>      x, p;
  Eigen::MatrixXd          values; // values(i, j) = W(x[i] + i p[j])
  double                   step = 0.0;
  std::vector<std::string> advisories;

  double  integral() const;
  Complex center_of_mass() const;
  double  max_value() const;
};

// W(alpha) = (2/pi) Tr[D(alpha) Pi D†(alpha) mu] with Pi the parity operator.
PhaseSpaceGrid wigner(FockOperator const &mu, GridSpec const &grid);

} // namespace vibronic
