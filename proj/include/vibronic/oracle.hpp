#pragma once

// Brute-force reference: the full Lindblad generator on the truncated joint
// space, assembled as a sparse matrix acting on column-stacked operators.
//
//   vec(A X B) = (B^T ⊗ A) vec(X),   vec index = col * D + row.

#include <vector>

#include <Eigen/Sparse>

#include "joint.hpp"
#include "model.hpp"
#include "types.hpp"

namespace vibronic {

enum class SpectrumKind
{
  Absorption,
  Emission,
};

} // namespace vibronic

namespace vibronic::oracle {

using SparseSuperoperator = Eigen::SparseMatrix<Complex>;

// Largest Fock cutoff accepted by the builders; the joint vector has
// (2(N+1))^2 entries.
inline constexpr Index kMaxCutoff = 120;

CVector vec(CMatrix const &X);
CMatrix unvec(CVector const &v, Index dim);

SparseSuperoperator left_multiply(CMatrix const &A);       // X -> A X
SparseSuperoperator right_multiply(CMatrix const &B);      // X -> X B
SparseSuperoperator sandwich(CMatrix const &A, CMatrix const &B); // X -> A X B
SparseSuperoperator commutator_generator(CMatrix const &H); // X -> -i[H, X]
SparseSuperoperator dissipator(CMatrix const &J);          // X -> 2 J X J† - J†J X - X J†J

// Joint operators with electronic index g = 0, e = 1.
CMatrix joint_hamiltonian(ModelParams const &p, Index N);
CMatrix sigma_minus(Index N);
CMatrix joint_annihilation(Index N);

SparseSuperoperator build_liouvillian(ModelParams const &p, Index N);

// Thermally damped oscillator with H = nu b†b + eta (b + b†).
SparseSuperoperator build_oscillator_liouvillian(double nu, double gamma, double mbar, Index N, double eta);

JointOperator apply(SparseSuperoperator const &L, JointOperator const &X);
// Heisenberg-picture action A -> A L defined by Tr[(A L) X] = Tr[A (L X)].
JointOperator apply_left(SparseSuperoperator const &L, JointOperator const &A);

// max |(vec 1)^T L| : zero for a trace-preserving generator.
double trace_preservation_residual(SparseSuperoperator const &L, Index dim);

enum class Propagator
{
  Taylor,        // action of exp(L h) by a truncated Taylor series on short substeps
  DormandPrince, // adaptive explicit Runge-Kutta 5(4)
};

struct PropagationResult
{
  std::vector<double>        times;
  std::vector<JointOperator> states;
};

PropagationResult propagate(SparseSuperoperator const &L, JointOperator const &rho0, std::vector<double> const &times,
                            Propagator method = Propagator::Taylor, double tolerance = 1e-12);

// Null vector with unit trace.
JointOperator steady_state(SparseSuperoperator const &L, Index N);
// Same for a bare oscillator generator on dimension N+1.
FockOperator oscillator_steady_state(SparseSuperoperator const &L, Index N);

struct Hygiene
{
  double hermiticity    = 0.0; // max |X - X†|
  double trace_error    = 0.0; // |Tr X - 1|
  double min_eigenvalue = 0.0;
};

Hygiene hygiene(JointOperator const &X);

// Eigenvalues of L closest to `shift`, by shift-invert Arnoldi.
std::vector<Complex> eigenvalues_near(SparseSuperoperator const &L, Complex shift, int count = 1, int krylov = 30);

// Re Tr[sigma_+ (i w - L)^{-1} x] at w = omega + offset, by one sparse solve per
// frequency. x is rho_st sigma_- for absorption; for emission it is built from
// the relaxed excited-manifold state (see oracle.cpp).
std::vector<double> correlation_spectrum(SpectrumKind kind, std::vector<double> const &offsets, ModelParams const &p,
                                         Index N);

} // namespace vibronic::oracle
