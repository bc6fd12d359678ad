#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vibronic {

using Index   = Eigen::Index;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Dense matrix on the truncated Fock space {|0>, ..., |N>}.
using FockOperator = CMatrix;

inline constexpr Complex kI{0.0, 1.0};

struct Error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Raised for physically invalid model parameters or configuration values.
struct InvalidParams : Error
{
  using Error::Error;
};

} // namespace vibronic
