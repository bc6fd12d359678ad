#include "vibronic/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace vibronic {

namespace {

// "Much smaller than nu" thresholds for the resolved-sideband flag.
constexpr double kResolvedGammaRatio = 0.25;
constexpr double kResolvedDecayRatio = 0.1;

std::string num(double v, char const *spec = "%g")
{
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

} // namespace

double mean_occupation(double x)
{
  if (!(x > 0.0) || !std::isfinite(x)) throw InvalidParams("mean_occupation: x = ħν/k_BT must be positive");
  return 1.0 / std::expm1(x);
}

double Occupation::m_bar() const
{
  if (kind == Kind::TemperatureRatio) return mean_occupation(value);
  return value;
}

bool Diagnostics::ok() const
{
  return std::none_of(items.begin(), items.end(), [](Diagnostic const &d) { return d.severity == Diagnostic::Severity::Error; });
}

bool Diagnostics::has(std::string_view code) const
{
  return std::any_of(items.begin(), items.end(), [&](Diagnostic const &d) { return d.code == code; });
}

namespace {

Diagnostics parameter_errors(ModelParams const &p)
{
  Diagnostics out;
  auto error = [&](std::string code, std::string msg) {
    out.items.push_back({Diagnostic::Severity::Error, std::move(code), std::move(msg)});
  };

  for (double v : {p.omega, p.nu, p.eta, p.Gamma, p.gamma, p.occupation.value, p.Gamma_star}) {
    if (!std::isfinite(v)) {
      error("non-finite", "all parameters must be finite");
      return out;
    }
  }
  if (!(p.nu > 0.0)) error("invalid-nu", "nu must be > 0 (got " + num(p.nu) + ")");
  if (p.gamma == 0.0)
    error("gamma-zero", "gamma = 0 is not supported: the oscillator steady state is not unique without damping");
  else if (!(p.gamma > 0.0))
    error("invalid-gamma", "gamma must be > 0 (got " + num(p.gamma) + ")");
  if (!(p.Gamma >= 0.0)) error("invalid-Gamma", "Gamma must be >= 0 (got " + num(p.Gamma) + ")");
  if (!(p.Gamma_star >= 0.0)) error("invalid-Gamma-star", "Gamma_star must be >= 0 (got " + num(p.Gamma_star) + ")");
  if (p.occupation.kind == Occupation::Kind::TemperatureRatio) {
    if (!(p.occupation.value > 0.0))
      error("invalid-occupation", "temperature ratio x must be > 0 (got " + num(p.occupation.value) + ")");
  } else if (!(p.occupation.value >= 0.0)) {
    error("invalid-occupation", "m_bar must be >= 0 (got " + num(p.occupation.value) + ")");
  }
  return out;
}

} // namespace

Diagnostics validate(ModelParams const &p)
{
  Diagnostics out = parameter_errors(p);
  if (!out.ok()) return out;

  if (p.gamma <= kResolvedGammaRatio * p.nu && p.Gamma <= kResolvedDecayRatio * p.nu) {
    out.items.push_back({Diagnostic::Severity::Info, "resolved-sidebands",
                         "Gamma, gamma << nu: vibronic sidebands are spectrally distinguishable"});
  }
  auto const d = derive(p);
  if (d.Gamma_tilde >= p.nu) {
    out.items.push_back({Diagnostic::Severity::Advisory, "overlapping-sidebands",
                         "Gamma_tilde = " + num(d.Gamma_tilde, "%.4g") + " >= nu: sidebands merge into a broad band"});
  }
  return out;
}

DerivedParams derive(ModelParams const &p)
{
  auto const errors = parameter_errors(p);
  if (!errors.ok()) throw InvalidParams(errors.items.front().message);

  DerivedParams d;
  d.params = p;
  d.m_bar  = p.m_bar();
  double const m = d.m_bar;

  d.beta        = -p.eta / Complex(p.nu, -0.5 * p.gamma);
  d.beta_abs2   = p.eta * p.eta / (p.nu * p.nu + 0.25 * p.gamma * p.gamma);
  d.huang_rhys  = (p.eta / p.nu) * (p.eta / p.nu);
  d.omega_R     = d.huang_rhys * p.nu;
  d.omega_tilde = p.omega - d.beta_abs2 * p.nu;
  d.Gamma_tilde = p.Gamma + d.beta_abs2 * p.gamma * (2.0 * m + 1.0) + p.Gamma_star;

  Complex const b  = d.beta;
  Complex const bc = std::conj(b);
  d.alpha_plus  = b * (m + 1.0) - bc * m;
  d.beta_plus   = (b - bc) * (m + 1.0);
  d.alpha_minus = (bc - b) * m;
  d.beta_minus  = bc * (m + 1.0) - b * m;
  d.varsigma    = (bc - b) * (2.0 * m + 1.0);
  return d;
}

} // namespace vibronic
