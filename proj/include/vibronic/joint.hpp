#pragma once

// Operators on the emitter-phonon space: a 2x2 block matrix over the
// electronic states {g, e}, every block a FockOperator. Block "ge" is the
// |g><e| component, so sigma_- lives in ge and sigma_+ in eg.

#include <Eigen/Dense>

#include "types.hpp"

namespace vibronic {

struct JointOperator
{
  FockOperator gg, ge, eg, ee;

  static JointOperator zero(Index N);
  // rho_el (2x2, basis g=0, e=1) tensored with an oscillator operator.
  static JointOperator product(Eigen::Matrix2cd const &rho_el, FockOperator const &osc);
  static JointOperator from_dense(CMatrix const &X);

  Index cutoff() const { return gg.rows() - 1; }

  FockOperator       &block(int row, int col);
  FockOperator const &block(int row, int col) const;

  // Dense (2(N+1))^2 matrix, row/column index el*(N+1) + fock.
  CMatrix dense() const;

  Complex          trace() const;
  FockOperator     trace_electronic() const;
  Eigen::Matrix2cd trace_oscillator() const;

  JointOperator adjoint() const;
  double        norm() const;
  // Frobenius norm over the Fock indices below the truncation edge.
  double masked_norm(double keep = 0.8) const;
  // Each block restricted to its top-left (N+1)x(N+1) corner.
  JointOperator crop(Index N) const;

  JointOperator &operator+=(JointOperator const &o);
  JointOperator &operator-=(JointOperator const &o);
  JointOperator &operator*=(Complex s);
};

JointOperator operator+(JointOperator a, JointOperator const &b);
JointOperator operator-(JointOperator a, JointOperator const &b);
JointOperator operator*(Complex s, JointOperator a);

// Tr[left * right]; the pairing under which damping-basis elements are dual.
Complex dual_pair(JointOperator const &left, JointOperator const &right);

} // namespace vibronic
