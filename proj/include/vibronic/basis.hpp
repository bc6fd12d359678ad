#pragma once

// Damping basis of the emitter-phonon Liouvillian: oscillator eigenelements,
// the four joint branches, and the closed-form overlaps that enter the
// spectra and the expansion coefficients.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include "joint.hpp"
#include "model.hpp"
#include "types.hpp"

namespace vibronic {

enum class Branch
{
  Population,     // ground-manifold populations, right element in gg
  CoherencePlus,  // right element in eg (sigma_+)
  CoherenceMinus, // right element in ge (sigma_-)
  Decay,          // excited-state decay, right element in gg and ee
};

enum class Sign
{
  Plus,
  Minus,
};

std::string to_string(Branch b);
Branch      branch_from_string(std::string const &s);

// A resolvent denominator of the decay branch vanished.
struct ResonanceError : Error
{
  ResonanceError(int n_, int l_, std::string const &what) : Error(what), n(n_), l(l_) {}
  int n, l;
};

// Oscillator eigenelements of the damped mode (frequency-independent part;
// the eigenvalue carries nu). Exact matrix elements on the truncated space.
FockOperator osc_right(int n, int l, double mbar, Index N);
FockOperator osc_left(int n, int l, double mbar, Index N);
Complex      osc_eigenvalue(int n, int l, double nu, double gamma);

Complex joint_eigenvalue(Branch b, int n, int l, DerivedParams const &d);

// Closed-form overlaps.
//   A^±_nl = Tr[D(alpha_±) mu_hat_nl(b, b† ± varsigma) D†(beta_±)]
//   B^±_nl = Tr[D(beta_±) mu_check†_nl(b, b† ± varsigma) D†(alpha_±) mu_th]
//   C_nl^mk = Tr[mu_check†_nl D(beta) mu_hat_mk D†(beta)], zero for m > n
Complex overlap_A(int n, int l, Sign s, DerivedParams const &d);
Complex overlap_B(int n, int l, Sign s, DerivedParams const &d);
Complex overlap_C(int n, int l, int m, int k, DerivedParams const &d);

// Absorption weights W_nl = A^-_nl B^-_nl and emission weights W'_nl = conj(W_{n,-l}).
Complex weight_W(int n, int l, DerivedParams const &d);
Complex weight_W_emission(int n, int l, DerivedParams const &d);

// Internal cutoff on which displaced and shifted elements are assembled
// before cropping to N.
Index padded_cutoff(Index N, double beta_abs2, double mbar);

struct EigenEntry
{
  Branch        branch;
  int           n = 0, l = 0;
  Complex       eigenvalue;
  JointOperator right;
  JointOperator left; // stored as the operator rho_check†, dual under Tr[left right]
};

class DampingBasis
{
public:
  struct Options
  {
    double resolvent_tolerance = 1e-13; // tail bound for the decay-branch expansion
    int    min_shells          = 4;
    int    max_shells          = 400;
  };

  DampingBasis(DerivedParams d, Index N);
  DampingBasis(DerivedParams d, Index N, Options opt);

  DerivedParams const &params() const { return d_; }
  Index                cutoff() const { return N_; }
  Index                padded() const { return P_; }

  // Memoized; safe to call from several threads.
  std::shared_ptr<EigenEntry const> entry(Branch b, int n, int l) const;
  JointOperator const &right(Branch b, int n, int l) const { return entry(b, n, l)->right; }
  JointOperator const &left(Branch b, int n, int l) const { return entry(b, n, l)->left; }

  // Direct Fock-space traces matching overlap_A/B/C (computed on the padded cutoff).
  Complex trace_A(int n, int l, Sign s) const;
  Complex trace_B(int n, int l, Sign s) const;
  Complex trace_C(int n, int l, int m, int k) const;

  // gg block of the decay element from a linear solve of
  // (L_g - lambda_nl + Gamma) X = -Gamma D(beta) mu_hat_nl D†(beta) on the cutoff N.
  FockOperator decay_ground_by_solve(int n, int l) const;

private:
  EigenEntry build(Branch b, int n, int l) const;

  FockOperator shifted_right(int n, int l, Sign s) const;
  FockOperator shifted_left(int n, int l, Sign s) const;
  FockOperator displaced(FockOperator const &X_padded) const;
  FockOperator decay_ground(int n, int l) const;
  FockOperator population_excited_left(int n, int l) const;

  DerivedParams d_;
  Index         N_, P_;
  Options       opt_;
  FockOperator  D_beta_, D_alpha_plus_, D_beta_plus_, D_alpha_minus_, D_beta_minus_;

  mutable std::mutex                                                            mutex_;
  mutable std::map<std::tuple<int, int, int>, std::shared_ptr<EigenEntry const>> cache_;
};

} // namespace vibronic
