#include "vibronic/joint.hpp"

#include <stdexcept>

#include "vibronic/fock.hpp"

namespace vibronic {

JointOperator JointOperator::zero(Index N)
{
  fock::check_cutoff(N);
  FockOperator const z = FockOperator::Zero(N + 1, N + 1);
  return {z, z, z, z};
}

JointOperator JointOperator::product(Eigen::Matrix2cd const &rho_el, FockOperator const &osc)
{
  return {rho_el(0, 0) * osc, rho_el(0, 1) * osc, rho_el(1, 0) * osc, rho_el(1, 1) * osc};
}

JointOperator JointOperator::from_dense(CMatrix const &X)
{
  if (X.rows() != X.cols() || X.rows() % 2 != 0 || X.rows() < 4)
    throw std::invalid_argument("JointOperator::from_dense: expected a square matrix of even dimension >= 4");
  Index const d = X.rows() / 2;
  return {X.topLeftCorner(d, d), X.topRightCorner(d, d), X.bottomLeftCorner(d, d), X.bottomRightCorner(d, d)};
}

FockOperator &JointOperator::block(int row, int col)
{
  return const_cast<FockOperator &>(static_cast<JointOperator const &>(*this).block(row, col));
}

FockOperator const &JointOperator::block(int row, int col) const
{
  if (row == 0) return col == 0 ? gg : ge;
  return col == 0 ? eg : ee;
}

CMatrix JointOperator::dense() const
{
  Index const d = gg.rows();
  CMatrix X(2 * d, 2 * d);
  X << gg, ge, eg, ee;
  return X;
}

Complex JointOperator::trace() const { return gg.trace() + ee.trace(); }

FockOperator JointOperator::trace_electronic() const { return gg + ee; }

Eigen::Matrix2cd JointOperator::trace_oscillator() const
{
  Eigen::Matrix2cd r;
  r << gg.trace(), ge.trace(), eg.trace(), ee.trace();
  return r;
}

JointOperator JointOperator::adjoint() const { return {gg.adjoint(), eg.adjoint(), ge.adjoint(), ee.adjoint()}; }

double JointOperator::norm() const
{
  return std::sqrt(gg.squaredNorm() + ge.squaredNorm() + eg.squaredNorm() + ee.squaredNorm());
}

double JointOperator::masked_norm(double keep) const
{
  Index const k = fock::edge_limit(gg.rows(), keep);
  auto sq = [k](FockOperator const &X) { return X.topLeftCorner(k, k).squaredNorm(); };
  return std::sqrt(sq(gg) + sq(ge) + sq(eg) + sq(ee));
}

JointOperator JointOperator::crop(Index N) const
{
  return {fock::crop(gg, N), fock::crop(ge, N), fock::crop(eg, N), fock::crop(ee, N)};
}

JointOperator &JointOperator::operator+=(JointOperator const &o)
{
  gg += o.gg;
  ge += o.ge;
  eg += o.eg;
  ee += o.ee;
  return *this;
}

JointOperator &JointOperator::operator-=(JointOperator const &o)
{
  gg -= o.gg;
  ge -= o.ge;
  eg -= o.eg;
  ee -= o.ee;
  return *this;
}

JointOperator &JointOperator::operator*=(Complex s)
{
  gg *= s;
  ge *= s;
  eg *= s;
  ee *= s;
  return *this;
}

JointOperator operator+(JointOperator a, JointOperator const &b) { return a += b; }
JointOperator operator-(JointOperator a, JointOperator const &b) { return a -= b; }
JointOperator operator*(Complex s, JointOperator a) { return a *= s; }

Complex dual_pair(JointOperator const &left, JointOperator const &right)
{
  return fock::trace_product(left.gg, right.gg) + fock::trace_product(left.ge, right.eg) +
         fock::trace_product(left.eg, right.ge) + fock::trace_product(left.ee, right.ee);
}

} // namespace vibronic
