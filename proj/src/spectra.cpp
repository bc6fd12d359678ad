#include "vibronic/spectra.hpp"

#include <cmath>
#include <stdexcept>

#include "vibronic/basis.hpp"
#include "vibronic/special.hpp"

namespace vibronic {

namespace {

Complex weight(int n, int l, DerivedParams const &d, SpectrumKind kind)
{
  return kind == SpectrumKind::Absorption ? weight_W(n, l, d) : weight_W_emission(n, l, d);
}

double line(Complex W, double omega_probe, Complex lambda)
{
  return (W / (Complex(0.0, omega_probe) - lambda)).real();
}

} // namespace

WeightTable weight_table(DerivedParams const &d, SpectrumKind kind, SpectrumOptions const &opt)
{
  WeightTable t;
  for (int s = 0; s <= opt.max_shells; ++s) {
    double shell = 0.0;
    for (int n = 0; n <= s; ++n) {
      int const dl = s - n;
      for (int l : {-dl, dl}) {
        Complex const W = weight(n, l, d, kind);
        if (W != 0.0) {
          t.entries.push_back({n, l, W});
          t.sum += W;
          shell += std::abs(W);
        }
        if (dl == 0) break;
      }
    }
    t.shells     = s + 1;
    t.last_shell = shell;
    if (s + 1 >= opt.min_shells && shell < opt.tail_tolerance) return t;
  }
  throw Error("weight_table: tail bound not reached within the shell limit");
}

SpectrumSeries spectrum(SpectrumKind kind, std::vector<double> const &offsets, DerivedParams const &d,
                        SpectrumOptions const &opt)
{
  if (!(d.Gamma_tilde > 0.0)) throw InvalidParams("spectrum: Gamma_tilde must be positive");
  if (kind == SpectrumKind::Emission && !(d.params.Gamma > 0.0))
    throw InvalidParams("emission spectrum requires Gamma > 0");
  SpectrumSeries s;
  s.kind    = kind;
  s.offsets = offsets;
  s.params  = d;
  s.weights = weight_table(d, kind, opt);
  s.total.assign(offsets.size(), 0.0);
  double const scale = kind == SpectrumKind::Emission ? 1.0 / d.params.Gamma : 1.0;
  for (auto const &e : s.weights.entries) {
    Complex const lam = joint_eigenvalue(Branch::CoherenceMinus, e.n, e.l, d);
    for (std::size_t i = 0; i < offsets.size(); ++i)
      s.total[i] += scale * line(e.weight, d.params.omega + offsets[i], lam);
  }
  if (opt.normalize) {
    s.normalization = scale * s.weights.sum.real();
    for (double &v : s.total) v /= s.normalization;
  }
  return s;
}

SpectrumSeries absorption(std::vector<double> const &offsets, DerivedParams const &d, SpectrumOptions const &opt)
{
  return spectrum(SpectrumKind::Absorption, offsets, d, opt);
}

SpectrumSeries emission(std::vector<double> const &offsets, DerivedParams const &d, SpectrumOptions const &opt)
{
  return spectrum(SpectrumKind::Emission, offsets, d, opt);
}

SpectrumSeries spectrum_components(SpectrumKind kind, std::vector<double> const &offsets, DerivedParams const &d,
                                   std::vector<std::pair<int, int>> const &which)
{
  if (kind == SpectrumKind::Emission && !(d.params.Gamma > 0.0))
    throw InvalidParams("emission spectrum requires Gamma > 0");
  SpectrumSeries s;
  s.kind    = kind;
  s.offsets = offsets;
  s.params  = d;
  s.total.assign(offsets.size(), 0.0);
  double const scale = kind == SpectrumKind::Emission ? 1.0 / d.params.Gamma : 1.0;
  for (auto [n, l] : which) {
    if (n < 0) throw std::invalid_argument("spectrum_components: n must be non-negative");
    Complex const W   = weight(n, l, d, kind);
    Complex const lam = joint_eigenvalue(Branch::CoherenceMinus, n, l, d);
    auto &curve = s.components[{n, l}];
    curve.resize(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      curve[i] = scale * line(W, d.params.omega + offsets[i], lam);
      s.total[i] += curve[i];
    }
    s.weights.entries.push_back({n, l, W});
    s.weights.sum += W;
  }
  return s;
}

double sideband_intensity(int l, DerivedParams const &d)
{
  double const m = d.m_bar;
  if (!(m > 0.0)) throw InvalidParams("sideband_intensity: mbar = 0; use the zero-temperature path");
  double const  x  = 0.5 * std::log1p(1.0 / m);
  Complex const b2 = d.beta * d.beta;
  double theta = b2.imag();
  if (d.beta_abs2 > 0.0) theta += double(l) * std::arg(b2); // arg beta^{2l}
  return std::exp(-b2.real() / std::tanh(x)) * special::bessel_i<double>(l, d.beta_abs2 / std::sinh(x)) *
         std::exp(-double(l) * x) * std::cos(theta);
}

double sideband_intensity_zero_temperature(int l, DerivedParams const &d)
{
  if (d.m_bar != 0.0) throw InvalidParams("sideband_intensity_zero_temperature: mbar must be 0");
  return weight_W(0, l, d).real();
}

SidebandIntensity sideband_report(int l, DerivedParams const &d)
{
  SidebandIntensity r{l, 0.0, 0.0, false};
  r.value = d.m_bar > 0.0 ? sideband_intensity(l, d) : sideband_intensity_zero_temperature(l, d);
  Complex sum = 0.0;
  for (int n = 0; n < 10000; ++n) {
    Complex const W = weight_W(n, l, d);
    sum += W;
    if (n > 2 && std::abs(W) < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  r.weight_sum = sum.real();
  r.negative   = r.value < 0.0;
  return r;
}

std::vector<Peak> local_maxima(std::vector<double> const &offsets, std::vector<double> const &values)
{
  if (offsets.size() != values.size()) throw std::invalid_argument("local_maxima: size mismatch");
  std::vector<Peak> out;
  for (std::size_t i = 1; i + 1 < values.size(); ++i)
    if (values[i] > values[i - 1] && values[i] > values[i + 1]) out.push_back({i, offsets[i], values[i]});
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points)
{
  if (points < 2 || !(hi > lo)) throw std::invalid_argument("linear_grid: need lo < hi and at least 2 points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = lo + (hi - lo) * double(i) / double(points - 1);
  return g;
}

} // namespace vibronic
