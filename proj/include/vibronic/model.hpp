#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "types.hpp"

namespace vibronic {

// Thermal occupation of the phonon mode, given either as mbar directly or as
// the ratio x = ħν / k_B T.
struct Occupation
{
  enum class Kind
  {
    MeanNumber,
    TemperatureRatio,
  };
  Kind   kind  = Kind::MeanNumber;
  double value = 0.0;

  static Occupation mean_number(double mbar) { return {Kind::MeanNumber, mbar}; }
  static Occupation temperature_ratio(double x) { return {Kind::TemperatureRatio, x}; }
  double            m_bar() const;
};

// mbar = 1 / (e^x - 1) for x = ħν / k_B T > 0.
double mean_occupation(double x);

// Physical inputs; ħ = 1 and rates are usually quoted in units of nu.
struct ModelParams
{
  double     omega      = 0.0; // electronic transition frequency
  double     nu         = 1.0; // phonon frequency
  double     eta        = 0.0; // vibronic coupling
  double     Gamma      = 0.0; // spontaneous decay rate
  double     gamma      = 0.2; // phonon damping rate
  Occupation occupation = Occupation::mean_number(0.0);
  double     Gamma_star = 0.0; // pure electronic dephasing rate

  double m_bar() const { return occupation.m_bar(); }
};

struct DerivedParams
{
  ModelParams params;
  double      m_bar = 0.0;

  Complex beta;              // -eta / (nu - i gamma/2)
  double  beta_abs2   = 0.0; // |beta|^2
  double  huang_rhys  = 0.0; // S = (eta/nu)^2
  double  omega_R     = 0.0; // S nu
  double  omega_tilde = 0.0; // omega - |beta|^2 nu
  double  Gamma_tilde = 0.0; // Gamma + |beta|^2 gamma (2 mbar + 1) + Gamma_star

  Complex alpha_plus, beta_plus, alpha_minus, beta_minus;
  Complex varsigma; // (beta* - beta)(2 mbar + 1)

  // Zero-phonon-line shift omega_tilde - omega.
  double zpl_shift() const { return omega_tilde - params.omega; }
};

DerivedParams derive(ModelParams const &p);

struct Diagnostic
{
  enum class Severity
  {
    Info,
    Advisory,
    Error,
  };
  Severity    severity;
  std::string code;
  std::string message;
};

struct Diagnostics
{
  std::vector<Diagnostic> items;

  bool ok() const;
  bool has(std::string_view code) const;
};

// Regime report. Never throws.
//   error codes: invalid-nu, invalid-gamma, gamma-zero, invalid-Gamma, invalid-occupation,
//                invalid-Gamma-star, non-finite
//   info: resolved-sidebands (Gamma, gamma well below nu)
//   advisory: overlapping-sidebands (ZPL full width Gamma_tilde reaches nu)
Diagnostics validate(ModelParams const &p);

} // namespace vibronic
